"""Command-line front end and document serialization."""
