import json
import tempfile
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from conmutacion.excepciones import NonfiniteState, ParseError
from conmutacion.forms import parse_scenario, scenario_to_toml, signal_to_toml
from conmutacion.services.escenario import caja_por_defecto, horizonte_simulacion, run_scenario

from .utils import EPS, T_ADYACENTE, leer_escenario, senal_periodica

MINIMO = """
[subsystem.a]
A = [[-1.0, 0.0], [0.0, -1.0]]
b = [1.0, 0.0]

[analysis]
eps = 0.1
certify = true
"""

TRES_MODOS = """
[subsystem.u]
A = [[-1.0, -1.0], [1.0, -1.0]]
family = { offset = [0.0, 1.0], slope = [1.0, 0.0] }
u_values = [1.0, 0.0, -1.0]

[analysis]
eps = 0.05
dwell_table = true
"""


class LecturaTests(SimpleTestCase):

    def test_ejemplo_incluido(self):
        s = parse_scenario(leer_escenario('example1.scenario'))
        self.assertEqual(s.name, 'example1')
        self.assertEqual(s.system.labels, ['u1', 'u2', 'u3'])
        self.assertEqual(s.eps, EPS)
        self.assertEqual(s.signal.switch_times, [1.43, 2.86])
        self.assertEqual(len(s.initial_points), 17)
        self.assertEqual(s.horizon, 2.86)
        self.assertEqual(s.ordered_analyses, ['certify', 'dwell_table', 'trapping', 'triangle', 'tube'])

    def test_equilibrios_de_la_familia(self):
        s = parse_scenario(leer_escenario('example1.scenario'))
        equilibrios = [s.system[m].equilibrium for m in ('u1', 'u2', 'u3')]
        np.testing.assert_allclose(equilibrios, [[0.0, 1.0], [-0.5, 0.5], [-1.0, 0.0]], atol=1e-12)

    def test_valores_por_defecto(self):
        s = parse_scenario(MINIMO, nombre='minimo')
        self.assertEqual(s.name, 'minimo')
        self.assertEqual(s.step, 1e-3)
        self.assertEqual(s.seed, 42)
        self.assertEqual(s.tol_membership, 1e-9)
        self.assertEqual(s.samples, 10000)
        self.assertIsNone(s.signal)

    def test_ajustes_de_linea_de_comandos(self):
        s = parse_scenario(leer_escenario('example1.scenario'), ajustes={'analysis.eps': 0.1, 'numeric.step': 0.01})
        self.assertEqual(s.eps, 0.1)
        self.assertEqual(s.step, 0.01)

    def test_periodica(self):
        s = parse_scenario(leer_escenario('example1_periodic.scenario'))
        self.assertTrue(s.signal.is_periodic)
        self.assertAlmostEqual(s.signal.period, 8.4)
        self.assertEqual(s.i_max, 12)

    def test_documento_vacio(self):
        with self.assertRaises(ValidationError):
            parse_scenario('')

    def test_clave_desconocida(self):
        with self.assertRaises(ValidationError) as contexto:
            parse_scenario(MINIMO + 'colour = 1\n')
        self.assertIn('analysis.colour: clave desconocida.', contexto.exception.messages)

    def test_clave_desconocida_en_subsistema(self):
        texto = MINIMO.replace('b = [1.0, 0.0]', 'b = [1.0, 0.0]\nc = 2')
        with self.assertRaises(ValidationError) as contexto:
            parse_scenario(texto)
        self.assertIn('subsystem.a.c: clave desconocida.', contexto.exception.messages)

    def test_seccion_desconocida(self):
        with self.assertRaises(ValidationError) as contexto:
            parse_scenario(MINIMO + '\n[extra]\nx = 1\n')
        self.assertIn('extra: sección desconocida.', contexto.exception.messages)

    def test_sin_analisis(self):
        with self.assertRaises(ValidationError):
            parse_scenario(MINIMO.replace('certify = true', ''))

    def test_documento_mal_formado(self):
        with self.assertRaises(ParseError) as contexto:
            parse_scenario('[system]\nname = "x"\nA = = 1\n')
        self.assertEqual(contexto.exception.linea, 3)

    def test_modo_desconocido_en_la_senal(self):
        texto = leer_escenario('example1.scenario').replace('transitions = ["u2", "u3"]', 'transitions = ["u2", "u7"]')
        with self.assertRaises(ValidationError) as contexto:
            parse_scenario(texto)
        self.assertTrue(any(m.startswith('signal.transitions') for m in contexto.exception.messages))

    def test_atrapamiento_requiere_senal(self):
        with self.assertRaises(ValidationError):
            parse_scenario(MINIMO.replace('certify = true', 'trapping = true'))

    def test_eps_no_positivo(self):
        with self.assertRaises(ValidationError):
            parse_scenario(MINIMO.replace('eps = 0.1', 'eps = 0.0'))


class SerializacionTests(SimpleTestCase):

    def test_ida_y_vuelta_del_escenario(self):
        original = parse_scenario(leer_escenario('example1.scenario'))
        copia = parse_scenario(scenario_to_toml(original))
        self.assertEqual(copia.name, original.name)
        self.assertEqual(copia.system.labels, original.system.labels)
        self.assertEqual(copia.signal.switch_times, original.signal.switch_times)
        self.assertEqual(copia.analyses, original.analyses)
        np.testing.assert_array_equal(np.array(copia.initial_points), np.array(original.initial_points))
        for sub in original.system:
            np.testing.assert_array_equal(copia.system[sub.label].equilibrium, sub.equilibrium)

    def test_senal_periodica_exacta(self):
        senal = senal_periodica(0.1)
        s = parse_scenario(TRES_MODOS + '\n' + signal_to_toml(senal))
        self.assertEqual(s.signal.switch_times, senal.switch_times)
        self.assertEqual(s.signal.period, senal.period)
        self.assertEqual(s.signal.modes, senal.modes)


class EjecucionTests(SimpleTestCase):

    def setUp(self):
        self.directorio = tempfile.TemporaryDirectory()
        self.salida = Path(self.directorio.name)

    def tearDown(self):
        self.directorio.cleanup()

    def test_ejemplo_completo(self):
        s = parse_scenario(leer_escenario('example1.scenario'))
        codigo, manifiesto = run_scenario(s, self.salida)
        self.assertEqual(codigo, 0)
        self.assertEqual(manifiesto['status'], 'pass')
        rutas = [entrada['path'] for entrada in manifiesto['files']]
        for esperado in ('certify.json', 'dwell_table.json', 'trapping.json', 'triangle.json', 'tube.json',
                         'trajectories/trajectory_000.csv', 'tubes/tube_u1_u2.csv'):
            self.assertIn(esperado, rutas)
        self.assertEqual(rutas, sorted(rutas))

        tabla = json.loads((self.salida / 'dwell_table.json').read_text(encoding='utf-8'))
        self.assertAlmostEqual(tabla['t_loc'], T_ADYACENTE, places=10)
        self.assertEqual(tabla['signal_violations'], [])
        atrapamiento = json.loads((self.salida / 'trapping.json').read_text(encoding='utf-8'))
        self.assertTrue(atrapamiento['overall_pass'])
        self.assertEqual(len(atrapamiento['runs']), 17)

        encabezado = (self.salida / 'trajectories' / 'trajectory_000.csv').read_text(encoding='utf-8').splitlines()[0]
        self.assertEqual(encabezado, 't,x1,x2,mode,V_active')
        self.assertTrue((self.salida / 'manifest.json').exists())

    def test_solo_certificado(self):
        s = parse_scenario(leer_escenario('example1.scenario').replace(
            'dwell_table = true\ntrapping = true\ntriangle = true\ntube = true\n', ''
        ))
        self.assertEqual(s.analyses, ('certify',))
        codigo, manifiesto = run_scenario(s, self.salida)
        self.assertEqual(codigo, 0)
        self.assertEqual([e['path'] for e in manifiesto['files']], ['certify.json'])
        reporte = json.loads((self.salida / 'certify.json').read_text(encoding='utf-8'))
        self.assertTrue(all(not r['decay_violations'] and not r['sandwich_violations'] for r in reporte['reports']))

    def test_senal_que_viola_la_permanencia(self):
        s = parse_scenario(leer_escenario('example1.scenario'), ajustes={'signal.T': 1.0})
        codigo, manifiesto = run_scenario(s, self.salida)
        self.assertEqual(codigo, 2)
        self.assertIn('trapping', manifiesto['failed'])
        self.assertTrue(any('permanencia' in nota for nota in manifiesto['notes']))
        tabla = json.loads((self.salida / 'dwell_table.json').read_text(encoding='utf-8'))
        self.assertEqual(len(tabla['signal_violations']), 2)

    def test_hash_del_manifiesto(self):
        s = parse_scenario(MINIMO)
        _, manifiesto = run_scenario(s, self.salida)
        entrada = manifiesto['files'][0]
        self.assertEqual(entrada['bytes'], (self.salida / entrada['path']).stat().st_size)
        self.assertEqual(len(entrada['sha256']), 64)

    def test_error_numerico_lleva_contexto(self):
        texto = leer_escenario('example1.scenario').replace(
            'points = [[0.0, 1.0]]', 'points = [[1e308, 1e308]]'
        )
        s = parse_scenario(texto)
        with np.errstate(over='ignore', invalid='ignore'):
            with self.assertRaises(NonfiniteState) as contexto:
                run_scenario(s, self.salida)
        self.assertIn('[example1: simulate]', str(contexto.exception))

    def test_caja_por_defecto(self):
        s = parse_scenario(leer_escenario('example1.scenario'))
        self.assertEqual(caja_por_defecto(s.system), [(-4.0, 3.0), (-3.0, 4.0)])

    def test_horizonte_de_simulacion(self):
        s = parse_scenario(leer_escenario('example1.scenario'))
        self.assertEqual(horizonte_simulacion(s), 2.86)
        periodico = parse_scenario(leer_escenario('example1_periodic.scenario'))
        ultimo = periodico.signal.instants(cantidad=periodico.i_max)[-1][0]
        self.assertEqual(horizonte_simulacion(periodico), max(periodico.horizon, ultimo))
