"""
Django settings for the instance image navigation project.

Only the pieces of Django this project uses are configured here: the app
registry (for management commands and test discovery), logging, and the
NAVIGATION block holding the default knobs of every module.

For more information on this file, see
https://docs.djangoproject.com/en/3.2/topics/settings/
"""

import math
import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get('NAV_SECRET_KEY', 'instance-nav-local-only')

DEBUG = os.environ.get('NAV_DEBUG', '0') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
  'rest_framework',
  'core',
  'simworld',
  'mapping',
  'reid',
  'localize',
  'planner',
  'pipeline',
  'evaluation',
]


# Nothing is stored through the ORM; every artifact is a file.

DATABASES = {}


# Internationalization
# https://docs.djangoproject.com/en/3.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Logging
# https://docs.djangoproject.com/en/3.2/topics/logging/

LOG_LEVEL = os.environ.get('NAV_LOG_LEVEL', 'INFO')

LOGGING = {
  'version': 1,
  'disable_existing_loggers': False,
  'formatters': {
    'plain': {
      'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
    },
  },
  'handlers': {
    'console': {
      'class': 'logging.StreamHandler',
      'formatter': 'plain',
    },
  },
  'loggers': {
    name: {
      'handlers': ['console'],
      'level': LOG_LEVEL,
      'propagate': False,
    }
    for name in [
      'core',
      'simworld',
      'mapping',
      'reid',
      'localize',
      'planner',
      'pipeline',
      'evaluation',
    ]
  },
}


# Serializers only; no views, so no authentication.

REST_FRAMEWORK = {
  'DEFAULT_AUTHENTICATION_CLASSES': [],
  'DEFAULT_PERMISSION_CLASSES': [],
  'UNAUTHENTICATED_USER': None,
}


# Default output directory of the management commands.

OUTPUT_DIR = Path(os.environ.get('NAV_OUTPUT_DIR', BASE_DIR.parent / 'runs'))


# Navigation system knobs. A run configuration file overrides the
# `agent` block; the other blocks are fixed per checkout.

NAVIGATION = {
  'format_version': 1,
  'categories': [
    'chair', 'couch', 'plant', 'bed', 'toilet', 'television',
  ],
  'agent_radius': 0.17,
  'agent_height': 1.41,
  'success_radius': 1.0,
  'forward_step': 0.25,
  'turn_angle': math.radians(30.0),
  'presets': {
    'paper-res': {'width': 640, 'height': 360},
    'desk-res': {'width': 320, 'height': 180},
  },
  'ego_camera': {
    'hfov': math.radians(42.0),
    'mount_height': 1.31,
    'pitch': 0.0,
  },
  'scene': {
    'resolution': 0.05,
    'extent': [7.0, 11.0],
    'rooms': [2, 4],
    'min_room_side': 2.6,
    'objects_per_room': [2, 3],
    'required_categories': {},
    'wall_height': 2.5,
    'wall_thickness': 0.1,
    'door_width': 1.0,
    'object_clearance': 0.45,
    'texture_noise': 0.15,
    'max_retries': 50,
  },
  'render': {
    'max_range': 10.0,
    'march_step': 0.025,
    'refine_iterations': 12,
    'texture_block': 0.06,
    'oracle_width': 80,
    'oracle_height': 45,
    'oracle_headings': 12,
    'oracle_pitches': [math.radians(-30.0), 0.0, math.radians(30.0)],
  },
  'goal_image': {
    'width': 512,
    'height': 512,
    'camera_height': [0.8, 1.5],
    'distance': [1.0, 3.0],
    'hfov': [math.radians(40.0), math.radians(70.0)],
    'min_coverage': 0.05,
    'max_attempts': 200,
  },
  'episodes': {
    'min_start_distance': 1.5,
    'viewpoint_spacing': 0.25,
    'max_draws': 200,
  },
  'mapping': {
    'cell_size': 0.05,
    'initial_size': 240,
    'floor_height': 0.1,
    'min_frontier_size': 4,
    'grow_margin': 40,
  },
  'planner': {
    'lookahead': 0.5,
    'deadband': math.radians(15.0),
    'explore_stop_radius': 0.25,
    'goal_stop_radius': 0.9,
  },
  'reid': {
    'fast_threshold': 20,
    'fast_arc': 9,
    'max_keypoints': 500,
    'patch_size': 31,
    'smoothing_sigma': 2.0,
    'descriptor_bits': 256,
    'pattern_seed': 20230512,
    'ratio': 0.8,
    'embed_size': 16,
  },
  'localize': {
    'crop_x': [1.0 / 3.0, 2.0 / 3.0],
    'crop_y': [1.0 / 3.0, 7.0 / 8.0],
    'min_points_per_cell': 1,
  },
  'agent': {
    'reid_method': 'conf-sum',
    'localization_method': 'mask-projected',
    'tau': None,
    'budget': 1000,
    'replan_every': 25,
    'preset': 'desk-res',
  },
  'pairs': {
    'fraction': 0.5,
    'images_per_instance': 4,
    'train_fraction': 0.5,
  },
  'evaluation': {
    'sweep_points': 7,
  },
}
