from django.contrib import admin

from .models import BerPoint, SimulationRun


class BerPointInline(admin.TabularInline):
    model = BerPoint
    extra = 0
    fields = ('snr_db', 'frames', 'bit_errors', 'frame_errors', 'ber', 'fer', 'wall_time')
    readonly_fields = fields


@admin.register(SimulationRun)
class SimulationRunAdmin(admin.ModelAdmin):
    list_display = ('id', 'code', 'L', 'md_map', 'mode', 'window', 'status', 'created_at')
    list_filter = ('code', 'mode', 'status')
    search_fields = ('code', 'md_map', 'plan_hash')
    readonly_fields = ('plan_hash', 'created_at', 'updated_at')
    inlines = [BerPointInline]
