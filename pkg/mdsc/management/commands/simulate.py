from django.core.management.base import BaseCommand, CommandError

from mdsc.channel import DEFAULT_CHUNK_FRAMES, emit_curve, resolve_code, simulate
from mdsc.forms import SimPlanForm, form_errors, mdsc_settings
from mdsc.models import BerPoint, SimulationRun

from ._helpers import EXIT_VALIDATION, emit, exit_codes, read_json, registry


class Command(BaseCommand):
    help = 'Run a BER/FER Monte Carlo simulation plan over the AWGN channel'

    def add_arguments(self, parser):
        parser.add_argument('--plan', required=True, help='Simulation plan JSON')
        parser.add_argument('--out', help='Write the BER curve here')
        parser.add_argument('--format', choices=['csv', 'json'], default='csv', help='Curve file format')
        parser.add_argument('--checkpoint', help='Checkpoint file used to resume an interrupted run')
        parser.add_argument('--workers', type=int, help='Worker processes (defaults to MDSC_WORKERS)')
        parser.add_argument('--no-save', dest='no_save', action='store_true', help='Do not store the run in the database')
        parser.add_argument('--json', action='store_true', help='Print JSON instead of text')

    @exit_codes
    def handle(self, *args, **options):
        tunables = mdsc_settings()
        fixtures = registry()
        form = SimPlanForm(read_json(options['plan']), registry=fixtures)
        if not form.is_valid():
            raise CommandError(form_errors(form), returncode=EXIT_VALIDATION)
        plan = form.cleaned_data['plan']
        spec, md = resolve_code(plan, fixtures)
        workers = options['workers'] or tunables.get('WORKERS', 1)

        run = None
        if not options['no_save']:
            run = SimulationRun.objects.create(
                code=plan.code,
                L=spec.L,
                md_map=plan.md_map if isinstance(plan.md_map, str) else ('inline' if plan.md_map else ''),
                mode=plan.mode,
                window=plan.window,
                seed=plan.seed,
                plan=plan.to_dict(),
                plan_hash=plan.plan_hash,
            )

        def save_point(record):
            if run is not None:
                BerPoint.from_record(run, record)

        try:
            records = simulate(
                plan,
                workers=workers,
                chunk_frames=tunables.get('SIMULATION', {}).get('CHUNK_FRAMES', DEFAULT_CHUNK_FRAMES),
                checkpoint=options['checkpoint'],
                on_point=save_point,
                fixtures=tunables.get('FIXTURES_PATH'),
            )
        except BaseException:
            if run is not None:
                run.status = 'failed'
                run.save()
            raise

        if run is not None:
            # points restored from a checkpoint were not reported while running
            for record in records:
                BerPoint.from_record(run, record)
            run.status = 'done'
            run.save()
        if options['out']:
            emit_curve(records, options['out'], options['format'])

        payload = {
            'run': run.id if run else None,
            'plan_hash': plan.plan_hash,
            'points': [record.to_dict() for record in records],
        }
        lines = [f"{'Eb/N0':>6}  {'frames':>8}  {'bit err':>8}  {'frame err':>9}  {'BER':>10}  {'FER':>10}"]
        lines += [
            f'{r.snr_db:6.2f}  {r.frames:8d}  {r.bit_errors:8d}  {r.frame_errors:9d}  {r.ber:10.3e}  {r.fer:10.3e}'
            for r in records
        ]
        if run is not None:
            lines.append(f'stored as run {run.id}')
        emit(self, payload, options['json'], lines)
