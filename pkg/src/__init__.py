"""WGM cavity-QED laboratory.

Simulation and analysis toolkit for coherent spectroscopy on rare-earth-doped
whispering-gallery-mode resonators: cavity-QED rates, mode volumes, photon echoes,
optical bistability sweeps and the fits that reduce them to physical constants.
"""

__version__ = "0.1.0"
