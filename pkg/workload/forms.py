from django import forms
from django.conf import settings

from allocators.exceptions import InvalidPolicy, InvalidProcedure
from allocators.policy import AllocationPolicy
from allocators.procedures import GrowthEvent, Procedure, check_boundaries
from scheduler.policies import SchedulePolicy


def _naturals(text, field):
    try:
        return tuple(int(part) for part in text.split(','))
    except ValueError:
        raise forms.ValidationError(f'{field} must be a comma separated list of integers') from None


class WorkloadHeaderForm(forms.Form):
    mem = forms.IntegerField(min_value=1)
    vmem = forms.IntegerField(min_value=1)
    page = forms.IntegerField(min_value=1)
    alloc = forms.CharField(required=False)
    policy = forms.CharField(required=False)

    def clean_alloc(self):
        descriptor = self.cleaned_data['alloc'] or settings.OSMODEL['DEFAULT_ALLOC']
        try:
            return AllocationPolicy.from_descriptor(descriptor)
        except InvalidPolicy as exc:
            raise forms.ValidationError(str(exc)) from None

    def clean_policy(self):
        descriptor = self.cleaned_data['policy'] or settings.OSMODEL['DEFAULT_POLICY']
        try:
            return SchedulePolicy.from_descriptor(descriptor)
        except InvalidPolicy as exc:
            raise forms.ValidationError(str(exc)) from None

    def clean(self):
        cleaned = super().clean()
        mem, page = cleaned.get('mem'), cleaned.get('page')
        if mem and page and mem % page:
            raise forms.ValidationError(f'mem {mem} is not a multiple of page size {page}')
        return cleaned


class ProcDirectiveForm(forms.Form):
    name = forms.RegexField(regex=r'^[A-Za-z_][\w.-]*$')
    size = forms.IntegerField(min_value=1)
    time = forms.IntegerField(min_value=1)
    segs = forms.CharField()
    prio = forms.IntegerField(min_value=0, required=False)
    grow = forms.CharField(required=False)

    def clean_name(self):
        name = self.cleaned_data['name']
        if name == settings.OSMODEL['NULL_PROCEDURE']:
            raise forms.ValidationError(f'{name} is reserved for the null procedure')
        return name

    def clean_segs(self):
        return _naturals(self.cleaned_data['segs'], 'segs')

    def clean_grow(self):
        text = self.cleaned_data['grow']
        if not text:
            return ()
        events = []
        for item in text.split(','):
            tick, sep, delta = item.partition(':')
            try:
                events.append(GrowthEvent(int(tick), int(delta)))
            except ValueError:
                raise forms.ValidationError(f'bad growth event {item!r}, expected tick:delta') from None
            if not sep:
                raise forms.ValidationError(f'bad growth event {item!r}, expected tick:delta')
        return tuple(events)

    def clean(self):
        cleaned = super().clean()
        name = cleaned.get('name', '?')
        if 'size' in cleaned and 'segs' in cleaned:
            try:
                check_boundaries(name, cleaned['size'], cleaned['segs'])
            except InvalidProcedure as exc:
                raise forms.ValidationError(str(exc)) from None
        if self.errors:
            return cleaned

        try:
            cleaned['procedure'] = Procedure(
                name=cleaned['name'],
                payload_size=cleaned['size'],
                declared_time=cleaned['time'],
                seg_boundaries=cleaned['segs'],
                priority=cleaned.get('prio'),
                growth_schedule=cleaned.get('grow') or (),
            )
        except InvalidProcedure as exc:
            raise forms.ValidationError(str(exc)) from None
        return cleaned


def error_summary(form):
    """Flatten form errors to one line, field errors prefixed by the field."""
    parts = []
    for field, errors in form.errors.items():
        for error in errors:
            parts.append(error if field == '__all__' else f'{field}: {error}')
    return '; '.join(parts)
