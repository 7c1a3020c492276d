"""Test suite of the WGM cavity-QED lab."""
