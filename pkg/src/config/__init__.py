"""Process settings read from the environment (WGM_LAB_*)."""
