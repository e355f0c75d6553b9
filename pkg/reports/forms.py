import math

from django import forms
from django.core.exceptions import ValidationError


class PositiveFloatField(forms.FloatField):
    default_error_messages = {
        'not_positive': 'Ensure this value is greater than 0.',
    }

    def validate(self, value):
        super().validate(value)
        if value is not None and value <= 0:
            raise ValidationError(self.error_messages['not_positive'], code='not_positive')


class FloatListField(forms.Field):
    """One or more positive numbers, given as a list or a comma-separated string"""
    default_error_messages = {
        'invalid': 'Enter positive numbers separated by commas.',
    }

    def to_python(self, value):
        if value in self.empty_values:
            return []
        items = value.split(',') if isinstance(value, str) else value
        try:
            numbers = [float(item) for item in items]
        except (TypeError, ValueError):
            raise ValidationError(self.error_messages['invalid'], code='invalid')
        if not numbers or not all(math.isfinite(x) and x > 0 for x in numbers):
            raise ValidationError(self.error_messages['invalid'], code='invalid')
        return numbers


class SweepField(forms.CharField):
    """start:stop:step with start > 0, stop >= start and step > 0"""
    default_error_messages = {
        'invalid': 'Enter a sweep as start:stop:step with 0 < start <= stop and step > 0.',
    }

    def to_python(self, value):
        value = super().to_python(value)
        if not value:
            return []
        try:
            start, stop, step = (float(part) for part in value.split(':'))
        except ValueError:
            raise ValidationError(self.error_messages['invalid'], code='invalid')
        if not all(math.isfinite(x) for x in (start, stop, step)) or not (0 < start <= stop and step > 0):
            raise ValidationError(self.error_messages['invalid'], code='invalid')
        count = math.floor((stop - start) / step + 1e-9) + 1
        return [start + k * step for k in range(count)]


class GridForm(forms.Form):
    samples = forms.IntegerField(min_value=2)
    half_width = PositiveFloatField(required=False)

    def clean_samples(self):
        samples = self.cleaned_data['samples']
        if samples % 2:
            raise ValidationError('Wavenumber grids need an even number of samples.')
        return samples


class SceneForm(forms.Form):
    wavelength = PositiveFloatField()
    distance = PositiveFloatField()


class SpectrumForm(GridForm):
    wavelength = FloatListField()
    distance = FloatListField()


class WaterfillForm(SceneForm, GridForm):
    noise_ssd = PositiveFloatField()
    power = PositiveFloatField()


class MercerForm(forms.Form):
    alpha = PositiveFloatField()
    power = PositiveFloatField()
    n0 = PositiveFloatField()
    length_sweep = SweepField(required=False)
    method = forms.ChoiceField(choices=(('closed', 'closed'), ('nystrom', 'nystrom')))
    grid = forms.IntegerField(min_value=16, required=False)
    modes_table = forms.BooleanField(required=False)
    length = PositiveFloatField(required=False)
    modes = forms.IntegerField(min_value=1)

    def clean(self):
        cleaned_data = super().clean()
        if not cleaned_data.get('modes_table') and 'length_sweep' in cleaned_data \
                and not cleaned_data['length_sweep']:
            self.add_error('length_sweep', 'A length sweep is required unless --modes-table is given.')
        return cleaned_data


class BoundsForm(SceneForm):
    length = PositiveFloatField(required=False)
    noise_variance = PositiveFloatField()
    grid = forms.IntegerField(min_value=16)
    periods = forms.IntegerField(min_value=3)
    shifts = forms.IntegerField(min_value=8)
    trials = forms.IntegerField(min_value=1)
    seed = forms.IntegerField(min_value=0, max_value=2 ** 64 - 1)

    def clean(self):
        cleaned_data = super().clean()
        grid, shifts = cleaned_data.get('grid'), cleaned_data.get('shifts')
        if grid is not None and shifts is not None and (grid % 2 or grid % shifts):
            self.add_error('grid', 'The grid must be even and a multiple of the shift count.')
        return cleaned_data


class SampledForm(SceneForm):
    length = PositiveFloatField()
    densities = FloatListField()
    beta = PositiveFloatField()
    source_power = PositiveFloatField()
    source_length = PositiveFloatField()
    noise_variance = PositiveFloatField()

    def clean_densities(self):
        densities = self.cleaned_data['densities']
        if any(b <= a for a, b in zip(densities, densities[1:])):
            raise ValidationError('Sampling densities must be increasing.')
        return densities


def flatten_errors(form):
    """A form's errors on one line: ``field: message; field: message``"""
    parts = []
    for field, errors in form.errors.items():
        name = 'options' if field == '__all__' else field
        parts.append(f'{name}: {" ".join(errors)}')
    return '; '.join(parts)
