from django.db import models

from .channel import BerRecord, curve_frame


class SimulationRun(models.Model):
    STATUS_CHOICES = [
        ('running', 'Running'),
        ('done', 'Done'),
        ('failed', 'Failed'),
    ]
    MODE_CHOICES = [
        ('block', 'Block'),
        ('windowed', 'Windowed'),
        ('md-windowed', 'MD windowed'),
    ]

    code = models.CharField(max_length=20)
    L = models.PositiveIntegerField(help_text="Coupling length used for the run")
    md_map = models.CharField(max_length=50, blank=True, help_text="MD map fixture name, 'inline' or empty")
    mode = models.CharField(max_length=12, choices=MODE_CHOICES, default='block')
    window = models.PositiveIntegerField(null=True, blank=True)
    seed = models.BigIntegerField(default=0)
    plan = models.JSONField()
    plan_hash = models.CharField(max_length=64, db_index=True)
    status = models.CharField(max_length=10, choices=STATUS_CHOICES, default='running')
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        label = f"{self.code} L={self.L}"
        if self.md_map:
            label += f" + {self.md_map}"
        return f"{label} ({self.mode}, {self.status})"

    def records(self):
        return [point.to_record() for point in self.points.order_by('snr_db')]

    def curve(self):
        return curve_frame(self.records())


class BerPoint(models.Model):
    run = models.ForeignKey(SimulationRun, on_delete=models.CASCADE, related_name='points')
    snr_db = models.FloatField(help_text="Eb/N0 in dB")
    frames = models.PositiveBigIntegerField()
    bit_errors = models.PositiveBigIntegerField()
    frame_errors = models.PositiveBigIntegerField()
    length = models.PositiveIntegerField(help_text="Code length in bits")
    ber = models.FloatField()
    fer = models.FloatField()
    wall_time = models.FloatField(default=0.0)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        unique_together = ['run', 'snr_db']
        ordering = ['snr_db']

    def __str__(self):
        return f"{self.snr_db:.2f} dB: BER {self.ber:.3e}"

    @classmethod
    def from_record(cls, run, record):
        point, _ = cls.objects.update_or_create(
            run=run,
            snr_db=record.snr_db,
            defaults={
                'frames': record.frames,
                'bit_errors': record.bit_errors,
                'frame_errors': record.frame_errors,
                'length': record.length,
                'ber': record.ber,
                'fer': record.fer,
                'wall_time': record.wall_time,
            }
        )
        return point

    def to_record(self):
        return BerRecord(
            snr_db=self.snr_db,
            frames=self.frames,
            bit_errors=self.bit_errors,
            frame_errors=self.frame_errors,
            length=self.length,
            wall_time=self.wall_time,
        )
