from mercer.expansion import exp_kernel_modes, information_curve, ssd_capacity
from mercer.models import ExponentialKernelParams
from reports.base import EmcapCommand
from reports.forms import MercerForm


class Command(EmcapCommand):
    help = (
        'Mutual information I(L) of the exponential receive kernel P exp(-alpha |r - r\'|) '
        'over a destination of length L, or its mode table. The mode equation '
        '2 arctan(omega / alpha) = k pi - omega L uses the destination length L.'
    )
    name = 'mercer'
    form_class = MercerForm

    def add_options(self, parser):
        parser.add_argument('--alpha', type=float, default=1.0, help='Kernel decay rate in 1/m.')
        parser.add_argument('--power', type=float, default=1.0, help='Received field power P.')
        parser.add_argument('--n0', type=float, default=1.0, help='Noise level N0 (white PSD N0/2).')
        parser.add_argument('--length-sweep', default='1:32:1', help='Destination lengths as start:stop:step, m.')
        parser.add_argument('--method', default='closed', help='closed or nystrom.')
        parser.add_argument('--grid', type=int, help='Nystrom grid size (default 64 alpha L, at least 256).')
        parser.add_argument('--modes-table', action='store_true', help='Emit k, omega_k, lambda_k instead.')
        parser.add_argument('--length', type=float, help='Destination length for --modes-table (default 1).')
        parser.add_argument('--modes', type=int, default=10, help='Rows of the mode table.')

    def build(self, report, options):
        length = options['length'] or 1.0
        params = ExponentialKernelParams(power=options['power'], alpha=options['alpha'], length=length)

        if options['modes_table']:
            spectrum = exp_kernel_modes(params, options['modes'], samples=0)
            report.columns('k', 'omega_k', 'lambda_k')
            for k, (omega, value) in enumerate(zip(spectrum.frequencies, spectrum.eigenvalues), start=1):
                report.row(k, omega, value)
            return

        curve = information_curve(
            params, options['length_sweep'], options['n0'], method=options['method'], grid=options['grid'],
        )
        report.columns('L', 'mi_nats', 'mi_bits')
        for length, information in curve:
            report.row(length, information.nats, information.bits)
        report.setting('ssd_limit_nats_per_m', ssd_capacity(params, options['n0']))
