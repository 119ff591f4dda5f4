"""
Lectura y validación de archivos de escenario (TOML). Cada sección se valida con un
formulario de Django; los errores se reportan con la ruta del campo (p. ej. `subsystem.u1.A`).
"""

import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np
import tomli_w
from django import forms
from django.core.exceptions import ValidationError

from ..constants import ANALISIS_DISPONIBLES, parametro
from ..excepciones import ParseError, UnsupportedCertificate
from ..models import (
    ClassKFn,
    QuadraticLyapunov,
    Scenario,
    SwitchedSystem,
    SwitchingSignal,
    make_affine_subsystem,
    signal_from_dwell,
)
from ..services.lyapunov import region_boundary_points

SECCIONES = ('system', 'subsystem', 'signal', 'initial', 'analysis', 'numeric')
TIPOS_SENAL = [('explicit', 'explicit'), ('from_dwell', 'from_dwell'), ('periodic', 'periodic')]


def _matriz(valor, ndim):
    try:
        arreglo = np.array(valor, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError('Debe ser una lista numérica.')
    if arreglo.ndim != ndim or arreglo.size == 0:
        raise ValidationError(f'Se esperaba un arreglo de {ndim} dimensión(es).')
    if not np.all(np.isfinite(arreglo)):
        raise ValidationError('Todos los valores deben ser finitos.')
    return arreglo


def _clase_k(valor):
    if valor is None:
        return None
    if not isinstance(valor, list) or len(valor) != 2:
        raise ValidationError('Debe ser un par [coeficiente, exponente].')
    try:
        return ClassKFn(float(valor[0]), float(valor[1]))
    except (TypeError, ValueError) as error:
        raise ValidationError(str(error))


def _son_numeros(valor):
    valores = valor if isinstance(valor, list) else [valor]
    return all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in valores)


class SistemaForm(forms.Form):
    dimension = forms.IntegerField(required=False, min_value=1)
    name = forms.CharField(required=False)


class SubsistemaForm(forms.Form):
    A = forms.JSONField()
    b = forms.JSONField(required=False)
    family = forms.JSONField(required=False)
    u_values = forms.JSONField(required=False)
    labels = forms.JSONField(required=False)
    P = forms.JSONField(required=False)
    alpha = forms.JSONField(required=False)
    beta = forms.JSONField(required=False)
    k = forms.FloatField(required=False)

    def clean_A(self):
        A = _matriz(self.cleaned_data.get('A'), 2)
        if A.shape[0] != A.shape[1]:
            raise ValidationError('A debe ser cuadrada.')
        return A

    def clean_b(self):
        valor = self.cleaned_data.get('b')
        return None if valor is None else _matriz(valor, 1)

    def clean_P(self):
        valor = self.cleaned_data.get('P')
        return None if valor is None else _matriz(valor, 2)

    def clean_alpha(self):
        return _clase_k(self.cleaned_data.get('alpha'))

    def clean_beta(self):
        return _clase_k(self.cleaned_data.get('beta'))

    def clean_k(self):
        k = self.cleaned_data.get('k')
        if k is not None and k <= 0:
            raise ValidationError('k debe ser positivo.')
        return k

    def clean_family(self):
        familia = self.cleaned_data.get('family')
        if familia is None:
            return None
        if not isinstance(familia, dict):
            raise ValidationError('family debe ser una tabla {offset, slope}.')
        desconocidas = set(familia) - {'offset', 'slope'}
        if desconocidas:
            raise ValidationError(f'Claves desconocidas en family: {", ".join(sorted(desconocidas))}.')
        if 'offset' not in familia or 'slope' not in familia:
            raise ValidationError('family necesita offset y slope.')
        return {'offset': _matriz(familia['offset'], 1), 'slope': _matriz(familia['slope'], 1)}

    def clean(self):
        cleaned_data = super().clean()
        b = cleaned_data.get('b')
        familia = cleaned_data.get('family')
        valores_u = cleaned_data.get('u_values')
        rotulos = cleaned_data.get('labels')

        if self.errors:
            return cleaned_data
        if (b is None) == (familia is None):
            raise ValidationError('Debe indicar b o family, no ambos.')
        if familia is not None:
            if not isinstance(valores_u, list) or not valores_u:
                self.add_error('u_values', 'family requiere una lista u_values no vacía.')
                return cleaned_data
            if any(isinstance(u, bool) or not isinstance(u, (int, float)) for u in valores_u):
                self.add_error('u_values', 'u_values debe contener números.')
                return cleaned_data
            if rotulos is not None and (not isinstance(rotulos, list) or len(rotulos) != len(valores_u)):
                self.add_error('labels', 'labels debe tener un rótulo por cada valor de u.')
                return cleaned_data
            if familia['offset'].shape != familia['slope'].shape:
                self.add_error('family', 'offset y slope deben tener el mismo largo.')
                return cleaned_data
        elif valores_u is not None or rotulos is not None:
            raise ValidationError('u_values y labels solo aplican con family.')
        if cleaned_data.get('P') is not None and (cleaned_data.get('alpha') is None or cleaned_data.get('beta') is None):
            raise ValidationError('Con P explícita se requieren alpha y beta.')
        return cleaned_data


class SenalForm(forms.Form):
    kind = forms.ChoiceField(choices=TIPOS_SENAL)
    t0 = forms.FloatField(required=False)
    initial_mode = forms.CharField()
    times = forms.JSONField(required=False)
    modes = forms.JSONField(required=False)
    period = forms.FloatField(required=False)
    transitions = forms.JSONField(required=False)
    T = forms.JSONField(required=False)

    def clean(self):
        cleaned_data = super().clean()
        if self.errors:
            return cleaned_data
        tipo = cleaned_data['kind']
        if tipo == 'explicit':
            tiempos = cleaned_data.get('times') or []
            modos = cleaned_data.get('modes') or []
            if not isinstance(tiempos, list) or not isinstance(modos, list) or len(tiempos) != len(modos):
                raise ValidationError('times y modes deben ser listas del mismo largo.')
            if not _son_numeros(tiempos):
                raise ValidationError('times debe contener solo números.')
            if cleaned_data.get('transitions') is not None or cleaned_data.get('T') is not None:
                raise ValidationError('Una señal explícita no usa transitions ni T.')
        else:
            transiciones = cleaned_data.get('transitions') or []
            permanencia = cleaned_data.get('T')
            if not isinstance(transiciones, list):
                self.add_error('transitions', 'transitions debe ser una lista de modos.')
            elif permanencia is None and (transiciones or tipo == 'periodic'):
                self.add_error('T', 'Se requiere T (número o lista).')
            elif permanencia is not None and not _son_numeros(permanencia):
                self.add_error('T', 'T debe ser un número o una lista de números.')
            if cleaned_data.get('times') is not None or cleaned_data.get('modes') is not None:
                raise ValidationError('times y modes solo aplican a señales explícitas.')
            if cleaned_data.get('period') is not None:
                raise ValidationError('period solo aplica a señales explícitas.')
        return cleaned_data


class CondicionesForm(forms.Form):
    points = forms.JSONField(required=False)
    boundary_of = forms.CharField(required=False)
    boundary_count = forms.IntegerField(required=False, min_value=3)

    def clean_points(self):
        valor = self.cleaned_data.get('points')
        return None if valor is None else _matriz(valor, 2)


class AnalisisForm(forms.Form):
    eps = forms.FloatField()
    certify = forms.BooleanField(required=False)
    dwell_table = forms.BooleanField(required=False)
    trapping = forms.BooleanField(required=False)
    convergence = forms.BooleanField(required=False)
    triangle = forms.BooleanField(required=False)
    tube = forms.BooleanField(required=False)
    transitions = forms.JSONField(required=False)
    i_max = forms.IntegerField(required=False, min_value=1)
    horizon = forms.FloatField(required=False)
    triangle_modes = forms.JSONField(required=False)
    tube_times = forms.JSONField(required=False)
    certify_box = forms.JSONField(required=False)

    def clean_eps(self):
        eps = self.cleaned_data.get('eps')
        if eps is None or eps <= 0:
            raise ValidationError('eps debe ser positivo.')
        return eps

    def clean_transitions(self):
        valor = self.cleaned_data.get('transitions')
        if valor is None:
            return None
        if not isinstance(valor, list) or any(not isinstance(p, list) or len(p) != 2 for p in valor):
            raise ValidationError('transitions debe ser una lista de pares [desde, hacia].')
        return [tuple(par) for par in valor]

    def clean_triangle_modes(self):
        valor = self.cleaned_data.get('triangle_modes')
        if valor is not None and (not isinstance(valor, list) or len(valor) != 3):
            raise ValidationError('triangle_modes debe ser [u0, v, u1].')
        return valor

    def clean_tube_times(self):
        valor = self.cleaned_data.get('tube_times')
        if valor is None:
            return None
        tiempos = _matriz(valor, 1)
        if np.any(tiempos < 0) or np.any(np.diff(tiempos) < 0):
            raise ValidationError('tube_times debe ser no negativa y creciente.')
        return tuple(float(t) for t in tiempos)

    def clean_certify_box(self):
        valor = self.cleaned_data.get('certify_box')
        if valor is None:
            return None
        caja = _matriz(valor, 2)
        if caja.shape[1] != 2 or np.any(caja[:, 1] <= caja[:, 0]):
            raise ValidationError('certify_box debe ser una lista de pares [inferior, superior].')
        return tuple(tuple(fila) for fila in caja.tolist())

    def clean(self):
        cleaned_data = super().clean()
        if not self.errors and not any(cleaned_data.get(nombre) for nombre in ANALISIS_DISPONIBLES):
            raise ValidationError('Se debe pedir al menos un análisis.')
        return cleaned_data


class NumericoForm(forms.Form):
    step = forms.FloatField(required=False)
    seed = forms.IntegerField(required=False, min_value=0)
    samples = forms.IntegerField(required=False, min_value=1)
    tol_membership = forms.FloatField(required=False, min_value=0)

    def clean_step(self):
        paso = self.cleaned_data.get('step')
        if paso is not None and paso <= 0:
            raise ValidationError('step debe ser positivo.')
        return paso


def _validar(form_cls, datos, ruta):
    """
    cleaned_data del formulario; claves fuera del formulario o errores se reportan con su ruta.
    """
    if not isinstance(datos, dict):
        raise ValidationError(f'{ruta}: debe ser una sección.')
    desconocidas = sorted(set(datos) - set(form_cls.base_fields))
    if desconocidas:
        raise ValidationError([f'{ruta}.{clave}: clave desconocida.' for clave in desconocidas])
    form = form_cls(data=datos)
    if not form.is_valid():
        mensajes = []
        for campo, errores in form.errors.items():
            prefijo = ruta if campo == '__all__' else f'{ruta}.{campo}'
            mensajes.extend(f'{prefijo}: {error}' for error in errores)
        raise ValidationError(mensajes)
    return form.cleaned_data


def _decodificar(texto):
    try:
        return tomllib.loads(texto)
    except tomllib.TOMLDecodeError as error:
        linea = getattr(error, 'lineno', None)
        columna = getattr(error, 'colno', None)
        if linea is None:
            coincidencia = re.search(r'line (\d+), column (\d+)', str(error))
            if coincidencia:
                linea, columna = int(coincidencia.group(1)), int(coincidencia.group(2))
        raise ParseError(f'Escenario mal formado: {error}', linea, columna) from error


def _construir_subsistemas(seccion):
    if not isinstance(seccion, dict) or not seccion:
        raise ValidationError('subsystem: el escenario no define subsistemas.')
    subsistemas = []
    for nombre, datos in seccion.items():
        ruta = f'subsystem.{nombre}'
        limpio = _validar(SubsistemaForm, datos, ruta)
        comunes = {
            'P': limpio['P'], 'alpha': limpio['alpha'], 'beta': limpio['beta'], 'decay_rate': limpio['k'],
        }
        if limpio['family'] is None:
            subsistemas.append(make_affine_subsystem(limpio['A'], limpio['b'], nombre, **comunes))
            continue
        familia = limpio['family']
        rotulos = limpio['labels'] or [f'{nombre}{i}' for i in range(1, len(limpio['u_values']) + 1)]
        for rotulo, u in zip(rotulos, limpio['u_values']):
            b = familia['offset'] + float(u) * familia['slope']
            subsistemas.append(make_affine_subsystem(limpio['A'], b, str(rotulo), **comunes))
    try:
        return SwitchedSystem.from_subsystems(subsistemas)
    except ValueError as error:
        raise ValidationError(f'subsystem: {error}')


def _rotulo(system, valor, ruta):
    if valor not in system:
        raise ValidationError(f'{ruta}: modo desconocido {valor!r}.')
    return valor


def _construir_senal(system, datos):
    limpio = _validar(SenalForm, datos, 'signal')
    t0 = limpio['t0'] or 0.0
    inicial = _rotulo(system, limpio['initial_mode'], 'signal.initial_mode')
    if limpio['kind'] == 'explicit':
        modos = [_rotulo(system, m, 'signal.modes') for m in limpio.get('modes') or []]
        tiempos = limpio.get('times') or []
        return SwitchingSignal(t0, tuple(zip(tiempos, modos)), inicial, limpio['period'])
    transiciones = [_rotulo(system, m, 'signal.transitions') for m in limpio['transitions'] or []]
    return signal_from_dwell(inicial, transiciones, limpio['T'], t0, periodic=limpio['kind'] == 'periodic')


def _horizonte_por_defecto(signal):
    if signal is None:
        return None
    if signal.is_periodic:
        return signal.t0 + signal.period
    if signal.segments:
        return signal.segments[-1][0]
    return None


def parse_scenario(texto, nombre=None, ajustes=None):
    """
    Escenario validado a partir del texto TOML, con los valores por defecto aplicados.

    `ajustes` ({'analysis.eps': 0.1, ...}) reemplaza claves del documento antes de validar.
    """
    documento = _decodificar(texto)
    for ruta, valor in (ajustes or {}).items():
        seccion, clave = ruta.split('.', 1)
        documento.setdefault(seccion, {})[clave] = valor
    desconocidas = sorted(set(documento) - set(SECCIONES))
    if desconocidas:
        raise ValidationError([f'{clave}: sección desconocida.' for clave in desconocidas])
    if 'subsystem' not in documento:
        raise ValidationError('subsystem: el escenario no define un sistema.')

    sistema_datos = _validar(SistemaForm, documento.get('system', {}), 'system')
    system = _construir_subsistemas(documento['subsystem'])
    if sistema_datos['dimension'] and sistema_datos['dimension'] != system.dimension:
        raise ValidationError(
            f'system.dimension: se declaró {sistema_datos["dimension"]} pero los subsistemas son de dimensión {system.dimension}.'
        )

    if 'analysis' not in documento:
        raise ValidationError('analysis: se requiere la sección con eps y los análisis pedidos.')
    analisis = _validar(AnalisisForm, documento['analysis'], 'analysis')
    numerico = _validar(NumericoForm, documento.get('numeric', {}), 'numeric')
    condiciones = _validar(CondicionesForm, documento.get('initial', {}), 'initial')

    signal = _construir_senal(system, documento['signal']) if 'signal' in documento else None
    pedidos = tuple(nombre_a for nombre_a in ANALISIS_DISPONIBLES if analisis.get(nombre_a))
    eps = analisis['eps']

    if signal is None and ('trapping' in pedidos or 'convergence' in pedidos):
        raise ValidationError('signal: los análisis de atrapamiento y convergencia requieren una señal.')

    puntos = []
    if condiciones['points'] is not None:
        if condiciones['points'].shape[1] != system.dimension:
            raise ValidationError(f'initial.points: cada punto debe tener {system.dimension} componentes.')
        puntos.extend(condiciones['points'])
    frontera = condiciones['boundary_of'] or None
    cantidad = condiciones['boundary_count']
    if frontera is not None:
        _rotulo(system, frontera, 'initial.boundary_of')
        cantidad = cantidad or parametro('PUNTOS_FRONTERA')
        puntos.extend(region_boundary_points(system[frontera], eps, cantidad))
    if ('trapping' in pedidos or 'convergence' in pedidos) and not puntos:
        raise ValidationError('initial: se necesitan condiciones iniciales para simular.')

    transiciones = analisis['transitions']
    if transiciones is not None:
        for i, (origen, destino) in enumerate(transiciones):
            _rotulo(system, origen, f'analysis.transitions[{i}]')
            _rotulo(system, destino, f'analysis.transitions[{i}]')
    triangulo = analisis['triangle_modes']
    if triangulo is not None:
        triangulo = tuple(_rotulo(system, m, 'analysis.triangle_modes') for m in triangulo)
    elif 'triangle' in pedidos:
        raise ValidationError('analysis.triangle_modes: el análisis triangular requiere [u0, v, u1].')
    caja = analisis['certify_box']
    if caja is not None and len(caja) != system.dimension:
        raise ValidationError(f'analysis.certify_box: se esperaban {system.dimension} intervalos.')

    horizonte = analisis['horizon'] if analisis['horizon'] is not None else _horizonte_por_defecto(signal)
    if signal is not None and horizonte is not None and horizonte <= signal.t0:
        raise ValidationError('analysis.horizon: debe ser mayor que t0.')
    if ('trapping' in pedidos or 'convergence' in pedidos) and horizonte is None:
        raise ValidationError('analysis.horizon: una señal constante requiere un horizonte explícito.')

    return Scenario(
        name=sistema_datos['name'] or nombre or 'escenario',
        system=system,
        eps=eps,
        signal=signal,
        initial_points=tuple(np.array(p, dtype=float) for p in puntos),
        analyses=pedidos,
        transitions=tuple(transiciones) if transiciones is not None else (),
        i_max=analisis['i_max'] or parametro('I_MAX'),
        horizon=horizonte,
        triangle_modes=triangulo,
        tube_times=analisis['tube_times'] or (),
        certify_box=caja,
        step=numerico['step'] or parametro('PASO'),
        seed=numerico['seed'] if numerico['seed'] is not None else parametro('SEMILLA'),
        samples=numerico['samples'] or parametro('MUESTRAS'),
        tol_membership=numerico['tol_membership'] if numerico['tol_membership'] is not None else parametro('TOL_PERTENENCIA'),
        boundary_of=frontera,
        boundary_count=cantidad,
    )


def _lista(arreglo):
    return np.asarray(arreglo, dtype=float).tolist()


def signal_to_dict(signal):
    datos = {
        'kind': 'explicit',
        't0': float(signal.t0),
        'initial_mode': str(signal.initial_mode),
        'times': [float(t) for t, _ in signal.segments],
        'modes': [str(m) for _, m in signal.segments],
    }
    if signal.is_periodic:
        datos['period'] = float(signal.period)
    return datos


def signal_to_toml(signal):
    """
    Sección [signal] explícita; los reales se escriben con representación exacta.
    """
    return tomli_w.dumps({'signal': signal_to_dict(signal)})


def _subsistema_a_dict(sub):
    if not sub.is_affine or not isinstance(sub.lyapunov, QuadraticLyapunov):
        raise UnsupportedCertificate(f'El modo {sub.label!r} no se puede serializar: no es afín con V cuadrática.')
    datos = {'A': _lista(sub.field.A), 'b': _lista(sub.field.b), 'k': float(sub.decay_rate)}
    if not sub.lyapunov.is_identity:
        datos['P'] = _lista(sub.lyapunov.P)
        datos['alpha'] = sub.alpha.as_list()
        datos['beta'] = sub.beta.as_list()
    return datos


def scenario_to_toml(s):
    """
    Documento TOML equivalente al escenario (condiciones iniciales ya expandidas).
    """
    documento = {
        'system': {'name': s.name, 'dimension': s.system.dimension},
        'subsystem': {str(sub.label): _subsistema_a_dict(sub) for sub in s.system},
    }
    if s.signal is not None:
        documento['signal'] = signal_to_dict(s.signal)
    if s.initial_points:
        documento['initial'] = {'points': [_lista(p) for p in s.initial_points]}

    analisis = {'eps': float(s.eps)}
    for nombre in ANALISIS_DISPONIBLES:
        analisis[nombre] = nombre in s.analyses
    if s.transitions:
        analisis['transitions'] = [[str(a), str(b)] for a, b in s.transitions]
    analisis['i_max'] = int(s.i_max)
    if s.horizon is not None:
        analisis['horizon'] = float(s.horizon)
    if s.triangle_modes is not None:
        analisis['triangle_modes'] = [str(m) for m in s.triangle_modes]
    if s.tube_times:
        analisis['tube_times'] = [float(t) for t in s.tube_times]
    if s.certify_box is not None:
        analisis['certify_box'] = [list(map(float, fila)) for fila in s.certify_box]
    documento['analysis'] = analisis
    documento['numeric'] = {
        'step': float(s.step),
        'seed': int(s.seed),
        'samples': int(s.samples),
        'tol_membership': float(s.tol_membership),
    }
    return tomli_w.dumps(documento)
