"""Simulator and verification harness for a complete hyperentangled Bell-state analyzer.

Two photons entangled in spatial, polarization and time-bin degrees of freedom
pass three heralded quantum-dot cavity blocks and a final time-bin erasing
block.  The spin readouts plus the detector clicks identify all 64
hyper-Bell states.
"""

__version__ = "0.1.0"
