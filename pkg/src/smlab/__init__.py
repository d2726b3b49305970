"""S-machine laboratory: machines, adding counters, composition, chord-diagram dispersion."""

__version__ = "0.1.0"
