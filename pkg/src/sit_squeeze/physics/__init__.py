"""Physical model: atomic data, lineshapes, rates, fields and the stochastic kernel."""
