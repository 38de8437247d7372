"""Resource package holding the default experiment configuration."""
