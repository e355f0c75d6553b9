from bounds.chain import run_chain_trials
from green.models import PhysicalScene
from reports.base import EmcapCommand
from reports.forms import BoundsForm


class Command(EmcapCommand):
    help = (
        'Check I_LL <= I_L2L <= I_inf2L on seeded random sources. '
        'Exits with 1 when the chain fails for any trial.'
    )
    name = 'bounds'
    form_class = BoundsForm

    def add_options(self, parser):
        parser.add_argument('--wavelength', type=float, default=1.0, help='Wavelength in m.')
        parser.add_argument('--distance', type=float, default=0.5, help='Line separation in m.')
        parser.add_argument('--length', type=float, help='Source length L in m (default: one wavelength).')
        parser.add_argument('--noise-variance', type=float, default=1e4, help='White noise variance.')
        parser.add_argument('--grid', type=int, default=16, help='Samples per length-L segment.')
        parser.add_argument('--periods', type=int, default=4, help='Virtual periods kept on each side.')
        parser.add_argument('--shifts', type=int, default=16, help='Equispaced shifts averaged per period.')
        parser.add_argument('--trials', type=int, default=50)
        parser.add_argument('--seed', type=int, default=0)

    def build(self, report, options):
        scene = PhysicalScene(wavelength=options['wavelength'], distance=options['distance'])
        results = run_chain_trials(
            scene,
            options['length'] or options['wavelength'],
            variance=options['noise_variance'],
            n=options['grid'],
            truncation=options['periods'],
            shifts=options['shifts'],
            trials=options['trials'],
            seed=options['seed'],
        )

        report.columns('trial', 'seed', 'i_LL', 'i_L2L', 'i_inf2L', 'chain_holds')
        for result in results:
            check = result.check
            report.row(result.trial, result.seed, check.i_ll, check.i_l2l, check.i_inf2l, check.holds)
        report.failures = sum(not r.check.holds for r in results)
        report.setting('trials_failed', report.failures)
        report.setting('trials_unsettled', sum(not r.check.stable for r in results))
