from itertools import product

from django.conf import settings

from green.models import PhysicalScene
from reports.base import EmcapCommand
from reports.forms import SpectrumForm
from spectrum.models import WavenumberGrid
from spectrum.summary import side_lobe_ratio, spectral_energy
from spectrum.transforms import green_spectrum


class Command(EmcapCommand):
    help = (
        'Spatial spectrum G(kappa) of the scalar Green kernel between parallel lines, '
        'for every (wavelength, distance) pair. The closed form of the propagating part '
        'uses the prefactor -j Z0 / (lambda sqrt(2 pi)); the split-kernel factor eta is 1.'
    )
    name = 'spectrum'
    form_class = SpectrumForm

    def add_options(self, parser):
        parser.add_argument('--wavelength', type=float, nargs='+', default=[5.0], help='Wavelengths in m.')
        parser.add_argument('--distance', type=float, nargs='+', default=[1.0], help='Line separations in m.')
        parser.add_argument('--samples', type=int, default=settings.EMCAP_SPECTRUM_SAMPLES,
                            help='Even number of wavenumber samples.')
        parser.add_argument('--half-width', type=float, help='Grid half-width in rad/m (default from the scene).')

    def build(self, report, options):
        report.columns('kappa', 're_G', 'im_G', 'abs_G')
        for wavelength, distance in product(options['wavelength'], options['distance']):
            scene = PhysicalScene(wavelength=wavelength, distance=distance)
            grid = WavenumberGrid.for_scene(scene, options['samples'], options['half_width'])
            g_spec = green_spectrum(scene, grid)

            report.comment(f'scene wavelength={wavelength:g} distance={distance:g} kappa in rad/m')
            for kappa, value in zip(g_spec.kappa, g_spec.values):
                report.row(kappa, value.real, value.imag, abs(value))
            report.setting('side_lobe_ratio', side_lobe_ratio(g_spec, scene))
            report.setting('energy', spectral_energy(g_spec))
