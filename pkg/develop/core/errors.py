"""
Jerarquía de errores de la calibración.

Todas las excepciones derivan de CalibrationError, que a su vez es un
ValueError, de modo que el código que ya captura ValueError sigue
funcionando. Sólo la CLI traduce estas excepciones a códigos de salida.
"""

from typing import Optional


class CalibrationError(ValueError):
    """Error base del sistema de calibración."""


class ConfigurationError(CalibrationError):
    """Parámetros, dimensiones o configuración inválidos."""


class DegenerateDesignError(CalibrationError):
    """Diseño de referencias degenerado (x constante o n insuficiente)."""


class DegenerateResponseError(CalibrationError):
    """Respuestas sin variabilidad (Syy = 0)."""


class DegeneratePosteriorError(CalibrationError):
    """Posterior no definida (p.ej. sigma_hat = 0 en Hoadley)."""


class NearZeroSlopeError(CalibrationError):
    """Pendiente demasiado cercana a cero para invertir la recta."""

    def __init__(self, slope: float, eps: float):
        self.slope = slope
        self.eps = eps
        super().__init__(f"|slope|={abs(slope):.3e} <= slope_eps={eps:.3e}")


class NumericalError(CalibrationError):
    """Fallo numérico del filtro (Q_t singular) en un instante t."""

    def __init__(self, message: str, t: Optional[int] = None,
                 proposal: Optional[int] = None):
        self.t = t
        self.proposal = proposal
        where = []
        if proposal is not None:
            where.append(f"proposal={proposal}")
        if t is not None:
            where.append(f"t={t}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class NoViableProposalError(CalibrationError):
    """Todas las propuestas tienen peso -inf."""


class MetricError(CalibrationError):
    """Entradas inválidas para una métrica de evaluación."""


class ParseError(CalibrationError):
    """Fichero de entrada mal formado; lleva el número de línea (1-based)."""

    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")
