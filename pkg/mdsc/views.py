from django.http import HttpResponse, JsonResponse
from django.shortcuts import get_object_or_404
from django.views.decorators.http import require_GET

from .code_model import assemble_md, assemble_sc
from .decoder import latency_estimate
from .exceptions import ResourceCapExceeded, SpecValidationError, UnknownFixture
from .exports import export_matrix
from .forms import CodeLengthForm, LatencyForm, MatrixExportForm, form_errors, mdsc_settings
from .models import SimulationRun
from .registry import load_registry

CONTENT_TYPES = {
    'alist': 'text/plain',
    'matrix-market': 'text/plain',
    'dense-text': 'text/plain',
}


def _registry():
    return load_registry(mdsc_settings().get('FIXTURES_PATH'))


def _error_response(e):
    if isinstance(e, UnknownFixture):
        return JsonResponse({'error': str(e)}, status=404)
    if isinstance(e, ResourceCapExceeded):
        return JsonResponse({'error': str(e)}, status=413)
    return JsonResponse({'error': str(e)}, status=400)


# API Views
@require_GET
def api_codes(request):
    """List the bundled constituent codes"""
    registry = _registry()
    return JsonResponse({'codes': [registry.describe(name) for name in registry.names()]})


@require_GET
def api_code_detail(request, name):
    """Spec, length and design rate of one code, optionally at another coupling length"""
    form = CodeLengthForm(request.GET)
    if not form.is_valid():
        return JsonResponse({'error': form_errors(form)}, status=400)
    try:
        return JsonResponse(_registry().describe(name, form.cleaned_data.get('L')))
    except SpecValidationError as e:
        return _error_response(e)


@require_GET
def api_code_matrix(request, name):
    """Download the parity-check matrix of a code, or of an MD-SC code built from a map fixture"""
    form = MatrixExportForm(request.GET)
    if not form.is_valid():
        return JsonResponse({'error': form_errors(form)}, status=400)
    fmt = form.cleaned_data.get('format') or 'alist'
    registry = _registry()
    try:
        md_map = form.cleaned_data.get('md_map')
        if md_map:
            owner = registry.map_code(md_map)
            if owner != name:
                return JsonResponse({'error': f'map {md_map} belongs to {owner}'}, status=400)
            spec, md = registry.mapping(md_map)
            H = assemble_md(spec, md)
        else:
            H = assemble_sc(registry.code(name, form.cleaned_data.get('L')))
        payload = export_matrix(H, fmt, mdsc_settings().get('DENSE_EXPORT_LIMIT', 10 ** 6))
    except (SpecValidationError, ResourceCapExceeded) as e:
        return _error_response(e)
    return HttpResponse(payload, content_type=CONTENT_TYPES[fmt])


@require_GET
def api_map_detail(request, name):
    """An MD map fixture, or the parameters of a map that is built on demand"""
    registry = _registry()
    if name in registry.recipes:
        recipe = registry.recipes[name]
        return JsonResponse({
            'name': name,
            'title': recipe.title,
            'code': recipe.code,
            'L': recipe.L,
            'recipe': {'L2': recipe.L2, 'd': recipe.d, 'T': recipe.T, 'k': recipe.k, 'seed': recipe.seed},
        })
    try:
        spec, md = registry.mapping(name)
    except SpecValidationError as e:
        return _error_response(e)
    fixture = registry.maps[name]
    return JsonResponse({
        'name': name,
        'title': fixture.title,
        'code': fixture.code,
        'L': fixture.L,
        'length': spec.length * md.L2,
        'density': md.density,
        'mapping': md.to_dict(),
    })


@require_GET
def api_runs(request):
    """Stored simulation runs, newest first"""
    runs = SimulationRun.objects.all()
    data = [{
        'id': run.id,
        'code': run.code,
        'L': run.L,
        'md_map': run.md_map,
        'mode': run.mode,
        'window': run.window,
        'status': run.status,
        'points': run.points.count(),
        'created_at': run.created_at.isoformat(),
    } for run in runs]
    return JsonResponse({'runs': data})


@require_GET
def api_run_curve(request, run_id):
    """BER/FER curve of one run with 95% confidence intervals"""
    run = get_object_or_404(SimulationRun, id=run_id)
    points = []
    for record in run.records():
        entry = record.to_dict()
        entry['ber_interval'] = list(record.ber_interval())
        entry['fer_interval'] = list(record.fer_interval())
        points.append(entry)
    return JsonResponse({'run': run.id, 'status': run.status, 'plan': run.plan, 'points': points})


@require_GET
def api_latency(request):
    """Latency bound of windowed decoding relative to block decoding"""
    form = LatencyForm(request.GET)
    if not form.is_valid():
        return JsonResponse({'error': form_errors(form)}, status=400)
    cd = form.cleaned_data
    try:
        estimate = latency_estimate(cd['W_D'], cd['m'], cd['L'], cd['T_rec'], cd['T_dec'])
    except SpecValidationError as e:
        return _error_response(e)
    return JsonResponse({'W_D': cd['W_D'], 'm': cd['m'], 'L': cd['L'], **estimate.to_dict()})
