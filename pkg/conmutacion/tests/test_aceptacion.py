"""
Reproducción de los ejemplos de referencia: permanencias, atrapamiento, nitidez,
desigualdad triangular, integrador, atracción global, certificados, tubos y determinismo.
"""

import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from conmutacion.forms import parse_scenario
from conmutacion.services import (
    check_certificate,
    closed_form_affine,
    combined_dwell,
    convergence_product,
    local_dwell,
    mu_bound,
    pairwise_dwell,
    region_boundary_points,
    simulate_switched,
    triangle_gap,
    tube_sample,
    v_eval,
    verify_trapping,
)
from conmutacion.services.escenario import run_scenario
from conmutacion.services.sim import integrate_batch

from .utils import EPS, leer_escenario, punto_nitidez, senal_ci, senal_periodica, sistema_ejemplo

TOL = 1e-6


class PermanenciaLocalTests(SimpleTestCase):

    def test_t_loc_del_ejemplo(self):
        tabla = local_dwell(EPS, sistema_ejemplo(), [('u1', 'u2'), ('u2', 'u3')])
        self.assertLess(abs(tabla.t_loc - 1.426), 1e-3)


class AtrapamientoTests(SimpleTestCase):

    def test_frontera_y_equilibrio(self):
        sistema = sistema_ejemplo()
        senal = senal_ci(1.43)
        puntos = list(region_boundary_points(sistema['u1'], EPS, 16)) + [np.array([0.0, 1.0])]
        for x0 in puntos:
            traj = simulate_switched(sistema, senal, x0, 2.86, step=1e-3)
            self.assertLessEqual(v_eval(sistema['u2'], traj.state_at(1.43)), EPS + TOL)
            self.assertLessEqual(v_eval(sistema['u3'], traj.state_at(2.86)), EPS + TOL)
            self.assertTrue(verify_trapping(traj, sistema, senal, EPS).overall_pass)


class NitidezTests(SimpleTestCase):

    def test_salir_apenas_de_la_region_rompe_el_atrapamiento(self):
        sistema = sistema_ejemplo()
        traj = simulate_switched(sistema, senal_ci(1.43), punto_nitidez(), 2.86)
        self.assertGreater(v_eval(sistema['u2'], traj.state_at(1.43)), EPS)


class DesigualdadTriangularTests(SimpleTestCase):

    def test_ruta_directa_mas_corta(self):
        s = sistema_ejemplo()
        directo = pairwise_dwell(EPS, s['u1'], s['u3'])
        dos_pasos = pairwise_dwell(EPS, s['u1'], s['u2']) + pairwise_dwell(EPS, s['u2'], s['u3'])
        self.assertLess(abs(directo - 1.9912), 1e-3)
        self.assertLess(abs(dos_pasos - 2.8522), 1e-3)
        self.assertLess(directo, dos_pasos)

        analisis = triangle_gap(EPS, s['u1'], s['u2'], s['u3'])
        self.assertLess(abs(analisis.gap + 0.861), 2e-3)
        self.assertLessEqual(abs(analisis.gap - analisis.gap_identity), 1e-10 * abs(analisis.gap))


class IntegradorTests(SimpleTestCase):

    def test_contra_la_exponencial_de_matriz(self):
        rng = np.random.default_rng(42)
        X0 = rng.uniform(-3.0, 3.0, size=(20, 2))
        for sub in sistema_ejemplo():
            tiempos, estados = integrate_batch(sub, X0, 0.0, 3.0, step=1e-3)
            exacta = closed_form_affine(sub, X0, tiempos)
            self.assertLessEqual(float(np.max(np.abs(estados - exacta))), 1e-8, sub.label)

    def test_reducir_el_paso_a_la_mitad(self):
        # con paso 1e-3 el error ya está en el piso de redondeo; el orden se mide con pasos gruesos
        rng = np.random.default_rng(42)
        X0 = rng.uniform(-3.0, 3.0, size=(20, 2))
        sub = sistema_ejemplo()['u1']
        exacta = closed_form_affine(sub, X0, [3.0])[0]
        errores = []
        for paso in (0.1, 0.05):
            _, estados = integrate_batch(sub, X0, 0.0, 3.0, step=paso)
            errores.append(float(np.max(np.abs(estados[-1] - exacta))))
        self.assertGreaterEqual(errores[0] / errores[1], 10.0)


class AtraccionGlobalTests(SimpleTestCase):

    def test_mu_y_t_glob(self):
        sistema = sistema_ejemplo()
        mu = mu_bound(EPS, sistema)
        self.assertLess(abs(mu - 53.65) / 53.65, 0.01)
        muestreado = mu_bound(EPS, sistema, 'sampled', n_samples=50000, radius=0.5, seed=42)
        self.assertLess(abs(muestreado - mu) / mu, 0.02)
        resultado = combined_dwell(EPS, sistema, [('u1', 'u2'), ('u2', 'u3'), ('u1', 'u3')])
        self.assertLess(abs(resultado['t_glob'] - 2.0112), 1e-3)

    def test_entrada_con_senal_periodica(self):
        sistema = sistema_ejemplo()
        senal = senal_periodica(2.1)
        traj = simulate_switched(sistema, senal, [5.0, 5.0], 25.2)
        reporte = convergence_product(sistema, senal, traj, EPS, i_max=12)
        self.assertTrue(all(b < a for a, b in zip(reporte.products, reporte.products[1:])))
        self.assertIsNotNone(reporte.entry_index)
        self.assertLessEqual(reporte.entry_index, 10)
        self.assertTrue(reporte.w_nonincreasing)


class CertificadoTests(SimpleTestCase):

    def test_diez_mil_muestras(self):
        caja = [(-3.0, 3.0), (-3.0, 3.0)]
        for sub in sistema_ejemplo():
            reporte = check_certificate(sub, caja, 10000, 42)
            self.assertEqual(len(reporte.decay_violations), 0)
            self.assertEqual(len(reporte.sandwich_violations), 0)
            falso = check_certificate(sub.with_decay_rate(3.0), caja, 10000, 42)
            self.assertGreaterEqual(len(falso.decay_violations), 1)


class TuboTests(SimpleTestCase):

    def test_imagen_de_la_frontera(self):
        sistema = sistema_ejemplo()
        T = pairwise_dwell(EPS, sistema['u1'], sistema['u2'])
        imagen = dict(tube_sample(sistema, 'u1', 'u2', EPS, [T], 360))[T]
        self.assertEqual(imagen.shape, (360, 2))
        self.assertLessEqual(float(np.max(v_eval(sistema['u2'], imagen))), EPS + TOL)

    def test_puntos_de_conmutacion_periodicos(self):
        sistema = sistema_ejemplo()
        senal = senal_periodica(1.43)
        periodo = senal.period
        traj = simulate_switched(sistema, senal, [-0.5, 0.5], 3.0 * periodo + 0.5)
        posteriores = [e for e in traj.switch_events if e.time > periodo + 1e-9]
        self.assertGreaterEqual(len(posteriores), 8)
        for evento in posteriores:
            self.assertLessEqual(v_eval(sistema[evento.next_mode], evento.state), EPS + TOL)


class DeterminismoTests(SimpleTestCase):

    def test_dos_corridas_identicas(self):
        s = parse_scenario(leer_escenario('example1.scenario'))
        with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
            _, primero = run_scenario(s, a)
            _, segundo = run_scenario(s, b)
            self.assertEqual(primero, segundo)
            for entrada in primero['files']:
                self.assertEqual(
                    (Path(a) / entrada['path']).read_bytes(), (Path(b) / entrada['path']).read_bytes()
                )
            self.assertEqual((Path(a) / 'manifest.json').read_bytes(), (Path(b) / 'manifest.json').read_bytes())
