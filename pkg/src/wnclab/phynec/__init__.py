"""Baseband OFDM physical layer with decode-and-forward joint modulation."""
