"""
URL configuration for CodeDesign_project project.

The admin lists stored simulation runs; everything else is the read-only JSON API of
the mdsc app.
"""
from django.contrib import admin
from django.urls import path, include

urlpatterns = [
    path('admin/', admin.site.urls),
    path('api/', include('mdsc.urls')),
]
