"""Domain services: sampling, verification, construction, search and experiments."""
