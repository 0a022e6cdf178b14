"""Command implementations behind the `zaremba` entry point."""
