import math
from itertools import permutations

import numpy as np
from django.test import SimpleTestCase

from conmutacion.excepciones import (
    EmptyConfiguration,
    EmptyTransitions,
    HeterogeneousCertificates,
    InvalidEpsilon,
    InvalidMu,
    NoThreshold,
    UnsupportedCertificate,
)
from conmutacion.models import ClassKFn, SwitchedSystem, make_affine_subsystem
from conmutacion.services import (
    combined_dwell,
    epsilon0_search,
    estimate_mu,
    global_dwell,
    local_dwell,
    mu_bound,
    pairwise_dwell,
    triangle_gap,
)
from conmutacion.services.dwell import (
    dwell_requirement,
    mu_pair,
    pairwise_dwell_raw,
    signal_transitions,
)

from .utils import A_EJEMPLO, EPS, MU_EJEMPLO, T_ADYACENTE, T_EXTREMOS, senal_periodica, sistema_ejemplo

CUADRADO = ClassKFn.square()


class PermanenciaPorParesTests(SimpleTestCase):

    def setUp(self):
        self.sistema = sistema_ejemplo()

    def test_valores_del_ejemplo(self):
        s = self.sistema
        self.assertAlmostEqual(pairwise_dwell(EPS, s['u1'], s['u2']), T_ADYACENTE, places=12)
        self.assertAlmostEqual(pairwise_dwell(EPS, s['u2'], s['u3']), T_ADYACENTE, places=12)
        self.assertAlmostEqual(pairwise_dwell(EPS, s['u1'], s['u3']), T_EXTREMOS, places=12)
        self.assertAlmostEqual(T_ADYACENTE, 1.42606, places=5)
        self.assertAlmostEqual(T_EXTREMOS, 1.99123, places=5)

    def test_simetria_en_el_ejemplo(self):
        s = self.sistema
        self.assertAlmostEqual(
            pairwise_dwell(EPS, s['u3'], s['u1']), pairwise_dwell(EPS, s['u1'], s['u3']), places=12
        )

    def test_mismo_equilibrio_se_trunca_en_cero(self):
        origen = self.sistema['u1']
        destino = make_affine_subsystem(
            A_EJEMPLO, [1.0, 1.0], 'p', P=0.5 * np.eye(2), alpha=ClassKFn(0.5, 2.0), beta=ClassKFn(0.5, 2.0)
        )
        self.assertAlmostEqual(pairwise_dwell_raw(EPS, origen, destino), -math.log(2.0) / 2.0, places=12)
        self.assertEqual(pairwise_dwell(EPS, origen, destino), 0.0)

    def test_eps_invalido(self):
        with self.assertRaises(InvalidEpsilon):
            pairwise_dwell(-1.0, self.sistema['u1'], self.sistema['u2'])

    def test_decrece_con_eps(self):
        u1, u3 = self.sistema['u1'], self.sistema['u3']
        valores = [pairwise_dwell(eps, u1, u3) for eps in (0.01, 0.05, 0.1, 0.5)]
        self.assertEqual(valores, sorted(valores, reverse=True))


class TablaLocalTests(SimpleTestCase):

    def setUp(self):
        self.sistema = sistema_ejemplo()

    def test_t_loc_sobre_todas_las_transiciones(self):
        tabla = local_dwell(EPS, self.sistema, permutations(self.sistema.labels, 2))
        self.assertEqual(len(tabla.entries), 6)
        self.assertAlmostEqual(tabla.t_loc, T_EXTREMOS, places=12)

    def test_t_loc_adyacente(self):
        tabla = local_dwell(EPS, self.sistema, [('u1', 'u2'), ('u2', 'u3'), ('u1', 'u2')])
        self.assertEqual(list(tabla.entries), [('u1', 'u2'), ('u2', 'u3')])
        self.assertAlmostEqual(tabla.t_loc, T_ADYACENTE, places=12)
        datos = tabla.as_dict()
        self.assertEqual(datos['entries'][0]['from'], 'u1')
        self.assertAlmostEqual(datos['entries'][0]['raw'], T_ADYACENTE, places=12)

    def test_sin_transiciones(self):
        with self.assertRaises(EmptyTransitions):
            local_dwell(EPS, self.sistema, [])

    def test_transiciones_de_una_senal_periodica(self):
        self.assertEqual(
            signal_transitions(senal_periodica()),
            [('u1', 'u2'), ('u2', 'u3'), ('u3', 'u2'), ('u2', 'u1')],
        )

    def test_requisito_para_validar_senales(self):
        exigido = dwell_requirement(self.sistema, EPS)
        self.assertAlmostEqual(exigido('u1', 'u3'), T_EXTREMOS, places=12)


class MuYGlobalTests(SimpleTestCase):

    def setUp(self):
        self.sistema = sistema_ejemplo()

    def test_mu_cerrado(self):
        self.assertAlmostEqual(mu_bound(EPS, self.sistema), MU_EJEMPLO, places=9)
        self.assertAlmostEqual(MU_EJEMPLO, 53.649, places=3)
        self.assertAlmostEqual(mu_pair(EPS, self.sistema['u1'], self.sistema['u2']), (1.0 + math.sqrt(10.0)) ** 2)

    def test_mu_muestreado_cerca_del_cerrado(self):
        muestreado = mu_bound(EPS, self.sistema, 'sampled', n_samples=50000, radius=0.5, seed=42)
        self.assertLessEqual(muestreado, MU_EJEMPLO * (1.0 + 1e-9))
        self.assertGreaterEqual(muestreado, 0.98 * MU_EJEMPLO)

    def test_un_solo_modo(self):
        sistema = SwitchedSystem.from_subsystems([self.sistema['u1']])
        self.assertEqual(mu_bound(EPS, sistema), 1.0)

    def test_certificado_ponderado_se_muestrea(self):
        ponderado = make_affine_subsystem(
            A_EJEMPLO, [0.0, 1.0], 'p', P=2.0 * np.eye(2), alpha=ClassKFn(2.0, 2.0), beta=ClassKFn(2.0, 2.0)
        )
        with self.assertRaises(UnsupportedCertificate):
            mu_pair(EPS, self.sistema['u1'], ponderado)
        sistema = SwitchedSystem.from_subsystems([self.sistema['u1'], ponderado])
        mu, muestreado = estimate_mu(EPS, sistema)
        self.assertTrue(muestreado)
        self.assertGreaterEqual(mu, 1.0)

    def test_t_glob(self):
        self.assertAlmostEqual(global_dwell(EPS, MU_EJEMPLO, 2.0), 1.01 * T_EXTREMOS, places=12)
        self.assertAlmostEqual(global_dwell(EPS, MU_EJEMPLO, 2.0, margin=0.0), T_EXTREMOS, places=12)
        self.assertAlmostEqual(1.01 * T_EXTREMOS, 2.01114, places=5)
        self.assertEqual(global_dwell(EPS, 1.0, 2.0), 0.0)

    def test_mu_invalido(self):
        with self.assertRaises(InvalidMu):
            global_dwell(EPS, 0.5, 2.0)

    def test_combinado(self):
        resultado = combined_dwell(EPS, self.sistema, permutations(self.sistema.labels, 2))
        self.assertAlmostEqual(resultado['t_loc'], T_EXTREMOS, places=12)
        self.assertAlmostEqual(resultado['mu'], MU_EJEMPLO, places=9)
        self.assertFalse(resultado['mu_sampled'])
        self.assertAlmostEqual(resultado['dwell'], resultado['t_glob'])
        self.assertGreater(resultado['dwell'], resultado['t_loc'])


class TrianguloTests(SimpleTestCase):

    def setUp(self):
        self.sistema = sistema_ejemplo()

    def test_brecha_del_ejemplo(self):
        s = self.sistema
        analisis = triangle_gap(EPS, s['u1'], s['u2'], s['u3'])
        self.assertAlmostEqual(analisis.gap, T_EXTREMOS - 2.0 * T_ADYACENTE, places=12)
        self.assertAlmostEqual(analisis.gap, -0.86089, places=5)
        self.assertAlmostEqual(analisis.gap, analisis.gap_identity, places=10)
        self.assertTrue(analisis.inequality_holds)
        self.assertIsNone(analisis.eps0)
        self.assertEqual(analisis.labels, ('u1', 'u2', 'u3'))

    def test_con_geometria(self):
        s = self.sistema
        r = math.sqrt(0.5)
        analisis = triangle_gap(EPS, s['u1'], s['u2'], s['u3'], d=1.0, r=r)
        esperado = (r * r / (2.0 * (1.0 - r))) ** 2
        self.assertAlmostEqual(analisis.eps0 / esperado, 1.0, places=5)
        self.assertLess(EPS, analisis.eps0)

    def test_certificados_heterogeneos(self):
        s = self.sistema
        with self.assertRaises(HeterogeneousCertificates):
            triangle_gap(EPS, s['u1'], s['u2'].with_decay_rate(1.5), s['u3'])


class Epsilon0Tests(SimpleTestCase):

    def test_umbral_cerrado(self):
        eps0 = epsilon0_search(1.0, 0.5, CUADRADO, CUADRADO, 2.0)
        self.assertAlmostEqual(eps0 / 0.0625, 1.0, places=5)

    def test_sin_tope(self):
        with self.assertLogs('conmutacion.services.dwell', level='WARNING'):
            self.assertEqual(epsilon0_search(1.0, 1.0, CUADRADO, CUADRADO, 2.0), 1e6)

    def test_umbral_bajo_el_piso_inicial(self):
        r = 1e-4
        eps0 = epsilon0_search(1.0, r, CUADRADO, CUADRADO, 2.0)
        self.assertLess(eps0, 1e-12)
        self.assertAlmostEqual(eps0 / (r * r / (2.0 * (1.0 - r))) ** 2, 1.0, places=5)

    def test_sin_umbral(self):
        with self.assertRaises(NoThreshold):
            epsilon0_search(1.0, 1e-160, CUADRADO, CUADRADO, 2.0)

    def test_configuracion_vacia(self):
        with self.assertRaises(EmptyConfiguration):
            epsilon0_search(1.0, 2.5, CUADRADO, CUADRADO, 2.0)


def _modo(equilibrio, rotulo):
    """
    Subsistema x' = A (x - equilibrio) con la matriz del ejemplo (k = 2, V = ||x - x_u||^2).
    """
    A = np.asarray(A_EJEMPLO)
    return make_affine_subsystem(A, -A @ np.asarray(equilibrio, dtype=float), rotulo)


def _en_disco(rng, radio):
    angulo = rng.uniform(0.0, 2.0 * np.pi)
    return radio * math.sqrt(rng.uniform()) * np.array([math.cos(angulo), math.sin(angulo)])


class PropiedadesAleatoriasTests(SimpleTestCase):

    def test_brecha_igual_a_la_identidad(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            u0, v, u1 = (_modo(rng.uniform(-3.0, 3.0, size=2), rotulo) for rotulo in ('a', 'b', 'c'))
            eps = 10.0 ** rng.uniform(-3.0, 0.0)
            analisis = triangle_gap(eps, u0, v, u1)
            self.assertTrue(
                math.isclose(analisis.gap, analisis.gap_identity, rel_tol=1e-10, abs_tol=1e-12),
                (analisis.gap, analisis.gap_identity),
            )

    def test_bajo_el_umbral_la_ruta_directa_gana(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            d = rng.uniform(0.5, 3.0)
            r = rng.uniform(0.05, 0.9) * d
            x0, x1 = _en_disco(rng, d), _en_disco(rng, d)
            while True:
                xv = rng.uniform(-3.0 * d, 3.0 * d, size=2)
                if np.linalg.norm(xv - x0) >= r and np.linalg.norm(xv - x1) >= r:
                    break
            eps0 = epsilon0_search(d, r, CUADRADO, CUADRADO, 2.0)
            eps = eps0 * rng.uniform(0.05, 0.95)
            analisis = triangle_gap(eps, _modo(x0, 'a'), _modo(xv, 'b'), _modo(x1, 'c'))
            self.assertLess(analisis.gap, 0.0, (d, r, eps0, eps))

    def test_bajo_el_umbral_en_el_ejemplo(self):
        s = sistema_ejemplo()
        eps0 = epsilon0_search(1.0, math.sqrt(2.0) / 2.0, CUADRADO, CUADRADO, 2.0)
        self.assertLess(triangle_gap(eps0 / 2.0, s['u1'], s['u2'], s['u3']).gap, 0.0)

    def test_umbral_crece_con_r(self):
        for d in (0.5, 1.0, 2.0, 3.0, 4.0):
            radios = [f * d for f in (0.1, 0.3, 0.5, 0.7, 0.9)]
            umbrales = [epsilon0_search(d, r, CUADRADO, CUADRADO, 2.0) for r in radios]
            self.assertTrue(all(a < b for a, b in zip(umbrales, umbrales[1:])), (d, umbrales))
            for r, eps0 in zip(radios, umbrales):
                self.assertAlmostEqual(eps0 / (r * r / (2.0 * (d - r))) ** 2, 1.0, places=5)

    def test_mu_cerrado_acota_al_muestreado(self):
        rng = np.random.default_rng(5)
        for semilla in range(10):
            sistema = SwitchedSystem.from_subsystems(
                [_modo(rng.uniform(-2.0, 2.0, size=2), rotulo) for rotulo in ('a', 'b')]
            )
            eps = 10.0 ** rng.uniform(-2.0, -0.3)
            cerrado = mu_bound(eps, sistema)
            muestreado = mu_bound(eps, sistema, 'sampled', n_samples=2000, radius=3.0, seed=semilla)
            self.assertLessEqual(muestreado, cerrado * (1.0 + 1e-9), (eps, cerrado, muestreado))

    def test_permanencia_crece_con_la_distancia(self):
        rng = np.random.default_rng(3)
        direccion = rng.normal(size=2)
        direccion /= np.linalg.norm(direccion)
        origen = _modo([0.0, 0.0], 'o')
        valores = [pairwise_dwell(EPS, origen, _modo(D * direccion, 'm')) for D in np.linspace(0.0, 5.0, 51)]
        self.assertTrue(all(b >= a - 1e-12 for a, b in zip(valores, valores[1:])))
        self.assertGreater(valores[-1], valores[0])
