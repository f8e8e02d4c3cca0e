"""
A labor kivétel hierarchiája.

Minden numerikus belépési pont ezeket dobja; a CLI a típus alapján
választja ki a kilépési kódot (2: konfiguráció, 3: futási hiba).
"""


class AcidLabError(Exception):
    """Közös ős minden labor hibához."""


class ShapeError(AcidLabError):
    """Méret- vagy alakeltérés két objektum között."""


class ValidationError(AcidLabError):
    """Érvénytelen érték (nem véges szám, tartományon kívüli paraméter)."""


class CapabilityError(AcidLabError):
    """Az operátor nem támogatja a kért műveletet (pl. nem differenciálható)."""


class DivergedError(AcidLabError):
    """Az ACID iteráció nem véges értéket adott."""

    def __init__(self, iteration, message=None):
        self.iteration = iteration
        super().__init__(message or f"non-finite value at iteration {iteration}")


class AttackAbortedError(AcidLabError):
    """
    Az adverzális keresés divergált.

    :param trace: az addig rögzített célfüggvény értékek
    """

    def __init__(self, trace, message=None):
        self.trace = list(trace)
        super().__init__(message or f"attack diverged after {len(self.trace)} iterations")


class ConfigError(AcidLabError):
    """
    Konfigurációs hiba.

    Elemzési hibánál a sor és oszlop ismert, validálási hibánál a kulcs.
    """

    def __init__(self, message, line=None, column=None, key=None):
        self.line = line
        self.column = column
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if key is not None:
            where.append(f"key '{key}'")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")
