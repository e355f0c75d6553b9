import numpy as np

from green.models import PhysicalScene
from numerics.models import Interval
from reports.base import EmcapCommand
from reports.forms import SampledForm
from sampled.covariance import normalized_capacity_sweep
from sampled.models import SourceAutocorrelation


class Command(EmcapCommand):
    help = (
        'Mutual information per meter of a sampled destination, as the sampling density grows, '
        'for a stationary source with autocorrelation P exp(-beta |s - s\'|).'
    )
    name = 'sampled'
    form_class = SampledForm

    def add_options(self, parser):
        parser.add_argument('--wavelength', type=float, default=5.0, help='Wavelength in m.')
        parser.add_argument('--distance', type=float, default=1.0, help='Line separation in m.')
        parser.add_argument('--length', type=float, default=2.0, help='Destination length in m.')
        parser.add_argument('--densities', default='4,8,16,32', help='Increasing samples per meter.')
        parser.add_argument('--beta', type=float, default=1.0, help='Source autocorrelation decay in 1/m.')
        parser.add_argument('--source-power', type=float, default=1.0)
        parser.add_argument('--source-length', type=float, default=4.0, help='Source support in m.')
        parser.add_argument('--noise-variance', type=float, default=1.0)

    def build(self, report, options):
        scene = PhysicalScene(wavelength=options['wavelength'], distance=options['distance'])
        power, beta = options['source_power'], options['beta']
        r_j = SourceAutocorrelation.stationary(
            lambda lag: power * np.exp(-beta * np.abs(lag)), Interval(0.0, options['source_length']),
        )
        sweep = normalized_capacity_sweep(
            scene, options['length'], options['densities'], r_j, options['noise_variance'],
        )

        report.columns('n', 'mi_nats', 'mi_per_meter')
        for point in sweep:
            report.row(point.n, point.mi_nats, point.mi_per_meter)
