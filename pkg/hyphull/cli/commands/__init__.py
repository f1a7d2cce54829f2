"""Subcommand modules of the hyphull command line."""
