from pathlib import Path

from conmutacion.excepciones import ErrorEntrada
from conmutacion.services.exportaciones import write_manifest, write_trajectory_csv
from conmutacion.services.sim import simulate_switched

from ._base import ComandoEscenario


class Command(ComandoEscenario):
    help = 'Simula el sistema conmutado desde cada condición inicial y escribe las trayectorias en CSV'
    opciones = ('out', 'step')
    salida_obligatoria = True

    def ejecutar(self, escenario, options):
        if escenario.signal is None or escenario.horizon is None:
            raise ErrorEntrada('El escenario no define una señal con horizonte.')
        if not escenario.initial_points:
            raise ErrorEntrada('El escenario no define condiciones iniciales.')
        out_dir = Path(options['out'])
        archivos = []
        for i, x0 in enumerate(escenario.initial_points):
            traj = simulate_switched(escenario.system, escenario.signal, x0, escenario.horizon, escenario.step)
            ruta = write_trajectory_csv(traj, escenario.system, out_dir / f'trajectory_{i:03d}.csv')
            archivos.append(ruta)
            self.stdout.write(f'{ruta.name}: {len(traj)} muestras, {len(traj.switch_events)} conmutaciones')
        write_manifest(out_dir, archivos, {'scenario': escenario.name})
        self.stdout.write(self.style.SUCCESS(f'{len(archivos)} trayectorias escritas en {out_dir}'))
