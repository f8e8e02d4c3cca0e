"""
acidlab - asztali méretű ACID laboratórium tomográfiás rekonstrukcióhoz.

Alcsomagok:
    grid       - kép és mérés konténerek, metrikák, F64GRID/PGM fájlok
    forward    - Radon és maszkolt Fourier mérési modellek
    sparsity   - gradiens transzformáció, soft-threshold, ritkító lépés
    recon      - rekonstrukciós operátorok (Φ) és diagnosztikák
    engine     - ACID iteráció, ablációk, kontrakció, adat-sweep
    adversary  - adverzális perturbáció keresés
    lab        - fantomok, konfiguráció, futtató és CLI
"""

__version__ = "0.3.0"
