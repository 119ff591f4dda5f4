from conmutacion.services.dwell import combined_dwell, local_dwell
from conmutacion.services.escenario import transiciones_escenario
from conmutacion.services.exportaciones import export_dwell_excel

from ._base import ComandoEscenario


class Command(ComandoEscenario):
    help = 'Tabla de tiempos de permanencia T^eps por transición, T_loc, mu(eps) y T_glob'
    opciones = ('eps',)

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--excel', type=str, help='Exporta la tabla a un archivo .xlsx')

    def ejecutar(self, escenario, options):
        transiciones = transiciones_escenario(escenario)
        tabla = local_dwell(escenario.eps, escenario.system, transiciones)

        self.stdout.write(f'eps = {tabla.eps:g}')
        for (origen, destino), valor in tabla.entries.items():
            self.stdout.write(f'  T[{origen} -> {destino}] = {valor:.6f}')
        self.stdout.write(self.style.SUCCESS(f'T_loc = {tabla.t_loc:.6f}'))

        if len(escenario.system) > 1:
            combinado = combined_dwell(escenario.eps, escenario.system, transiciones)
            aviso = ' (muestreado)' if combinado['mu_sampled'] else ''
            self.stdout.write(f"mu(eps) = {combinado['mu']:.6f}{aviso}")
            self.stdout.write(f"T_glob = {combinado['t_glob']:.6f}")
            self.stdout.write(self.style.SUCCESS(f"max(T_loc, T_glob) = {combinado['dwell']:.6f}"))

        if options.get('excel'):
            ruta = export_dwell_excel(tabla, options['excel'])
            self.stdout.write(self.style.SUCCESS(f'Tabla exportada a {ruta}'))
