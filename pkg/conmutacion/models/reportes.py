"""
Reportes de verificación serializables a JSON.
"""

import math
from dataclasses import dataclass, field


def _a_json(valor):
    if hasattr(valor, 'tolist'):
        return valor.tolist()
    if isinstance(valor, (list, tuple)):
        return [_a_json(v) for v in valor]
    if isinstance(valor, dict):
        return {str(k): _a_json(v) for k, v in valor.items()}
    return valor


@dataclass(frozen=True)
class CertificateReport:
    label: object
    samples_tested: int
    sandwich_violations: tuple
    decay_violations: tuple
    max_decay_slack: float

    @property
    def passed(self):
        return not self.sandwich_violations and not self.decay_violations

    def as_dict(self):
        return {
            'kind': 'certificate',
            'label': self.label,
            'samples_tested': self.samples_tested,
            'passed': self.passed,
            'max_decay_slack': self.max_decay_slack,
            'sandwich_violations': [
                {'x': _a_json(x), 'V': v, 'bounds': list(cotas)} for x, v, cotas in self.sandwich_violations
            ],
            'decay_violations': [
                {'x': _a_json(x), 'derivative': d, 'bound': cota} for x, d, cota in self.decay_violations
            ],
        }


@dataclass(frozen=True)
class DwellTable:
    """
    T^eps por transición y T_loc = máximo sobre las transiciones con que se construyó.

    `raw` guarda el valor de la fórmula sin truncar en cero.
    """
    eps: float
    entries: dict
    t_loc: float
    raw: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            'kind': 'dwell_table',
            'eps': self.eps,
            't_loc': self.t_loc,
            'entries': [
                {'from': origen, 'to': destino, 'T': valor, 'raw': self.raw.get((origen, destino), valor)}
                for (origen, destino), valor in self.entries.items()
            ],
        }


@dataclass(frozen=True)
class TriangleAnalysis:
    eps: float
    gap: float
    K: float
    gap_identity: float
    eps0: float = None
    labels: tuple = ()

    @property
    def inequality_holds(self):
        return self.gap < 0

    def as_dict(self):
        return {
            'kind': 'triangle',
            'eps': self.eps,
            'labels': list(self.labels),
            'gap': self.gap,
            'gap_identity': self.gap_identity,
            'K': self.K,
            'eps0': self.eps0,
            'inequality_holds': self.inequality_holds,
        }


@dataclass(frozen=True)
class TrappingRecord:
    index: int
    time: float
    mode: object
    value: float
    member: bool
    strict_member: bool

    def as_dict(self):
        return {
            'index': self.index,
            't': self.time,
            'mode': self.mode,
            'V': self.value,
            'member': self.member,
            'strict_member': self.strict_member,
        }


@dataclass(frozen=True)
class TrappingReport:
    eps: float
    records: tuple
    initial_record: TrappingRecord = None

    @property
    def overall_pass(self):
        return all(registro.member for registro in self.records)

    def record_at(self, t):
        for registro in self.records:
            if registro.time == t:
                return registro
        raise KeyError(t)

    def as_dict(self):
        return {
            'kind': 'trapping',
            'eps': self.eps,
            'overall_pass': self.overall_pass,
            'initial': self.initial_record.as_dict() if self.initial_record else None,
            'records': [registro.as_dict() for registro in self.records],
        }


@dataclass(frozen=True)
class MonotonicityVerdict:
    index: int
    t_start: float
    t_end: float
    mode: object
    nonincreasing: bool
    max_relative_increase: float

    def as_dict(self):
        return {
            'index': self.index,
            't_start': self.t_start,
            't_end': self.t_end,
            'mode': self.mode,
            'nonincreasing': self.nonincreasing,
            'max_relative_increase': self.max_relative_increase,
        }


@dataclass(frozen=True)
class ConvergenceReport:
    eps: float
    verdicts: tuple
    mu: tuple
    mu_tilde: tuple
    log_products: tuple
    certified: bool
    entry_index: int = None
    mu_sampled: bool = False

    @property
    def products(self):
        return tuple(math.exp(valor) for valor in self.log_products)

    @property
    def w_nonincreasing(self):
        return all(veredicto.nonincreasing for veredicto in self.verdicts)

    @property
    def status(self):
        return 'certified' if self.certified else 'not certified'

    def as_dict(self):
        return {
            'kind': 'convergence',
            'eps': self.eps,
            'status': self.status,
            'entry_index': self.entry_index,
            'mu_sampled': self.mu_sampled,
            'w_nonincreasing': self.w_nonincreasing,
            'mu': list(self.mu),
            'mu_tilde': list(self.mu_tilde),
            'log_products': list(self.log_products),
            'verdicts': [veredicto.as_dict() for veredicto in self.verdicts],
        }
