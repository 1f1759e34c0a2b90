"""Domain types shared by the services."""
