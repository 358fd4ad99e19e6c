from django.urls import path

from . import views

app_name = 'mdsc'

urlpatterns = [
    # Code fixtures
    path('codes/', views.api_codes, name='api_codes'),
    path('codes/<str:name>/', views.api_code_detail, name='api_code_detail'),
    path('codes/<str:name>/matrix/', views.api_code_matrix, name='api_code_matrix'),
    path('maps/<str:name>/', views.api_map_detail, name='api_map_detail'),

    # Stored simulation runs
    path('runs/', views.api_runs, name='api_runs'),
    path('runs/<int:run_id>/curve/', views.api_run_curve, name='api_run_curve'),

    # Windowed decoding latency
    path('latency/', views.api_latency, name='api_latency'),
]
