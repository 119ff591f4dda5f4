from pathlib import Path

from conmutacion.excepciones import ErrorEntrada
from conmutacion.services.exportaciones import emit_plot_data, write_manifest
from conmutacion.services.sim import simulate_switched, travel_comparison

from ._base import ComandoEscenario


class Command(ComandoEscenario):
    help = 'Escribe trayectorias, fronteras de N^eps y puntos de conmutación para graficar (solo en el plano)'
    opciones = ('out', 'step', 'eps')
    salida_obligatoria = True

    def ejecutar(self, escenario, options):
        if not escenario.initial_points:
            raise ErrorEntrada('Se necesitan condiciones iniciales para generar los datos.')
        out_dir = Path(options['out'])
        archivos = []

        if escenario.signal is not None and escenario.horizon is not None:
            for i, x0 in enumerate(escenario.initial_points):
                traj = simulate_switched(escenario.system, escenario.signal, x0, escenario.horizon, escenario.step)
                archivos.extend(emit_plot_data(traj, escenario.system, escenario.eps, out_dir / f'run_{i:03d}'))

        if escenario.triangle_modes is not None:
            origen, intermedio, destino = escenario.triangle_modes
            comparacion = travel_comparison(
                escenario.system, escenario.eps, origen, intermedio, destino,
                escenario.initial_points[0], escenario.step,
            )
            for nombre in ('direct', 'two_step'):
                datos = comparacion[nombre]
                archivos.extend(emit_plot_data(datos['trajectory'], escenario.system, escenario.eps, out_dir / nombre))
                self.stdout.write(
                    f"{nombre}: V_{destino}(x(T)) = {datos['V_target_final']:.6g}, "
                    f"primera entrada en t = {datos['first_entry_time']}"
                )

        if not archivos:
            raise ErrorEntrada('El escenario no tiene señal ni triangle_modes: no hay nada que graficar.')
        write_manifest(out_dir, archivos, {'scenario': escenario.name})
        self.stdout.write(self.style.SUCCESS(f'{len(archivos)} archivos escritos en {out_dir}'))
