from pathlib import Path

from conmutacion.excepciones import ErrorEntrada
from conmutacion.services.escenario import horizonte_simulacion
from conmutacion.services.exportaciones import write_json
from conmutacion.services.sim import convergence_product, simulate_switched, verify_trapping

from ._base import ComandoEscenario


class Command(ComandoEscenario):
    help = 'Verifica el atrapamiento x(t_i) en N^eps_{u_i} (y la convergencia si el escenario la pide)'

    def ejecutar(self, escenario, options):
        if escenario.signal is None or not escenario.initial_points:
            raise ErrorEntrada('La verificación requiere una señal y condiciones iniciales.')

        horizonte = horizonte_simulacion(escenario)

        resultados = []
        aprobado = True
        for i, x0 in enumerate(escenario.initial_points):
            traj = simulate_switched(escenario.system, escenario.signal, x0, horizonte, escenario.step)
            reporte = verify_trapping(traj, escenario.system, escenario.signal, escenario.eps, escenario.tol_membership)
            fila = {'run': i, 'trapping': reporte.as_dict()}
            if reporte.initial_record.member and not reporte.overall_pass:
                aprobado = False
            for registro in reporte.records:
                texto = f'  [{i}] t_{registro.index} = {registro.time:.6f} {registro.mode}: V = {registro.value:.6g}'
                self.stdout.write(texto if registro.member else self.style.WARNING(texto + ' (fuera)'))

            if escenario.requests('convergence'):
                convergencia = convergence_product(
                    escenario.system, escenario.signal, traj, escenario.eps, escenario.i_max
                )
                fila['convergence'] = convergencia.as_dict()
                aprobado = aprobado and convergencia.w_nonincreasing
                self.stdout.write(
                    f'  [{i}] convergencia: {convergencia.status}, entrada en {convergencia.entry_index}'
                )
            resultados.append(fila)

        if options.get('out'):
            ruta = write_json({'kind': 'verify', 'eps': escenario.eps, 'passed': aprobado, 'runs': resultados},
                              Path(options['out']) / 'verify.json')
            self.stdout.write(f'Reporte escrito en {ruta}')

        if not aprobado:
            self.fallar('La verificación falló en al menos una corrida.')
        self.stdout.write(self.style.SUCCESS('Verificación aprobada.'))
