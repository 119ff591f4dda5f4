from conmutacion.excepciones import ErrorEntrada
from conmutacion.services.dwell import triangle_gap

from ._base import ComandoEscenario


class Command(ComandoEscenario):
    help = 'Brecha de la desigualdad triangular del tiempo de viaje y umbral eps_0'
    opciones = ('eps',)

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--d', type=float, help='Cota de ||x_u0||, ||x_u1|| para eps_0')
        parser.add_argument('--r', type=float, help='Cota inferior de las distancias al modo intermedio')

    def ejecutar(self, escenario, options):
        if escenario.triangle_modes is None:
            raise ErrorEntrada('El escenario no define analysis.triangle_modes = [u0, v, u1].')
        if (options.get('d') is None) != (options.get('r') is None):
            raise ErrorEntrada('--d y --r se usan juntos.')
        u0, v, u1 = (escenario.system[m] for m in escenario.triangle_modes)
        analisis = triangle_gap(escenario.eps, u0, v, u1, options.get('d'), options.get('r'))

        self.stdout.write(f'{u0.label} -> {v.label} -> {u1.label}, eps = {analisis.eps:g}')
        self.stdout.write(f'  brecha directa   = {analisis.gap:.10f}')
        self.stdout.write(f'  brecha identidad = {analisis.gap_identity:.10f}')
        self.stdout.write(f'  K                = {analisis.K:.10g}')
        if analisis.eps0 is not None:
            self.stdout.write(f'  eps_0            = {analisis.eps0:.6g}')
        estilo = self.style.SUCCESS if analisis.inequality_holds else self.style.WARNING
        self.stdout.write(estilo('La ruta directa es más rápida.' if analisis.inequality_holds
                                 else 'La desigualdad triangular no se cumple para este eps.'))
