from django.conf import settings

from green.models import PhysicalScene
from reports.base import EmcapCommand
from reports.forms import WaterfillForm
from spectrum.models import WavenumberGrid
from spectrum.transforms import green_spectrum
from waterfill.allocation import equivalent_noise, waterfill_ssd
from waterfill.models import NoiseModel


class Command(EmcapCommand):
    help = 'Capacity-achieving source SSD for a line link against white noise (water-filling over kappa).'
    name = 'waterfill'
    form_class = WaterfillForm

    def add_options(self, parser):
        parser.add_argument('--wavelength', type=float, default=5.0, help='Wavelength in m.')
        parser.add_argument('--distance', type=float, default=1.0, help='Line separation in m.')
        parser.add_argument('--noise-ssd', type=float, default=90.0, help='White noise spectral density S_N.')
        parser.add_argument('--power', type=float, default=3.0, help='Source power budget P.')
        parser.add_argument('--samples', type=int, default=settings.EMCAP_SPECTRUM_SAMPLES,
                            help='Even number of wavenumber samples.')
        parser.add_argument('--half-width', type=float, help='Grid half-width in rad/m (default from the scene).')

    def build(self, report, options):
        scene = PhysicalScene(wavelength=options['wavelength'], distance=options['distance'])
        grid = WavenumberGrid.for_scene(scene, options['samples'], options['half_width'])
        noise_eq = equivalent_noise(NoiseModel.white(options['noise_ssd']), green_spectrum(scene, grid))
        result = waterfill_ssd(noise_eq, options['power'])

        report.columns('kappa', 's_nprime', 's_j', 'water_level')
        for kappa, floor, s_j in zip(grid.samples, noise_eq.values, result.s_j.values):
            report.row(kappa, floor, s_j, result.water_level)
        report.setting('capacity_nats_per_m', result.capacity)
        report.setting('capacity_bits_per_m', result.capacity_bits)
        report.setting('water_level', result.water_level)
        report.setting('allocated_power', result.allocated_power)
