# Generated by Django 5.2.5

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SimulationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('code', models.CharField(max_length=20)),
                ('L', models.PositiveIntegerField(help_text='Coupling length used for the run')),
                ('md_map', models.CharField(blank=True, help_text="MD map fixture name, 'inline' or empty", max_length=50)),
                ('mode', models.CharField(choices=[('block', 'Block'), ('windowed', 'Windowed'), ('md-windowed', 'MD windowed')], default='block', max_length=12)),
                ('window', models.PositiveIntegerField(blank=True, null=True)),
                ('seed', models.BigIntegerField(default=0)),
                ('plan', models.JSONField()),
                ('plan_hash', models.CharField(db_index=True, max_length=64)),
                ('status', models.CharField(choices=[('running', 'Running'), ('done', 'Done'), ('failed', 'Failed')], default='running', max_length=10)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='BerPoint',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('snr_db', models.FloatField(help_text='Eb/N0 in dB')),
                ('frames', models.PositiveBigIntegerField()),
                ('bit_errors', models.PositiveBigIntegerField()),
                ('frame_errors', models.PositiveBigIntegerField()),
                ('length', models.PositiveIntegerField(help_text='Code length in bits')),
                ('ber', models.FloatField()),
                ('fer', models.FloatField()),
                ('wall_time', models.FloatField(default=0.0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='points', to='mdsc.simulationrun')),
            ],
            options={
                'ordering': ['snr_db'],
                'unique_together': {('run', 'snr_db')},
            },
        ),
    ]
