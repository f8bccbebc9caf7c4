"""Social-network communication service with a measurement-driven
geolocation subsystem."""

__version__ = "0.1.0"
