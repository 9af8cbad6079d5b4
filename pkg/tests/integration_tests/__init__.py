
"""Define any integration tests you want in this directory."""
