"""
Resolved agent configuration handed to episode workers.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from django.conf import settings

from core.geometry import CameraModel
from localize.masks import LocalizeParams
from mapping.navmap import MapParams
from planner.actions import PlannerParams
from reid.classifiers import ORACLE as REID_ORACLE
from reid.features import FeatureParams
from simworld.render import RenderParams

MASK_PROJECTED = 'mask-projected'
CROP_PROJECTED = 'crop-projected'
CLASS_PROJECTED = 'class-projected'
LOCALIZE_ORACLE = 'oracle'
LOCALIZATION_METHODS = (MASK_PROJECTED, CROP_PROJECTED, CLASS_PROJECTED, LOCALIZE_ORACLE)


def preset_camera(preset):
    """Ego camera for a resolution preset."""
    nav = settings.NAVIGATION
    if preset not in nav['presets']:
        raise ValueError(f'unknown preset {preset!r}')
    size = nav['presets'][preset]
    ego = nav['ego_camera']
    return CameraModel(
        size['width'], size['height'], ego['hfov'], ego['mount_height'], ego['pitch'],
    )


@dataclass(frozen=True)
class AgentConfig:
    """Everything one episode run needs, free of Django settings access."""
    reid_method: str
    localization_method: str
    tau: float
    budget: int
    replan_every: int
    preset: str
    camera: CameraModel
    success_radius: float
    agent_radius: float
    forward_step: float
    turn_angle: float
    mapping: MapParams
    planner: PlannerParams
    reid: FeatureParams
    localize: LocalizeParams
    render: RenderParams

    @classmethod
    def from_settings(cls, mapping=None, planner=None, reid=None, localize=None,
                      **overrides):
        """Defaults from settings; knob groups take dicts of overrides."""
        nav = settings.NAVIGATION
        values = dict(nav['agent'])
        values.update(overrides)
        return cls(
            reid_method=values['reid_method'],
            localization_method=values['localization_method'],
            tau=values['tau'],
            budget=int(values['budget']),
            replan_every=int(values['replan_every']),
            preset=values['preset'],
            camera=preset_camera(values['preset']),
            success_radius=nav['success_radius'],
            agent_radius=nav['agent_radius'],
            forward_step=nav['forward_step'],
            turn_angle=nav['turn_angle'],
            mapping=MapParams.from_settings(**(mapping or {})),
            planner=PlannerParams.from_settings(**(planner or {})),
            reid=FeatureParams.from_settings(**(reid or {})),
            localize=LocalizeParams.from_settings(**(localize or {})),
            render=RenderParams.from_settings(),
        )

    @property
    def label(self):
        return f'{self.reid_method}+{self.localization_method}'

    def with_methods(self, reid_method, localization_method, tau=None):
        if reid_method != REID_ORACLE and tau is None:
            raise ValueError(f'{reid_method} needs a threshold')
        return dataclasses.replace(
            self,
            reid_method=reid_method,
            localization_method=localization_method,
            tau=tau,
        )

    def with_tau(self, tau):
        return dataclasses.replace(self, tau=tau)


@dataclass(frozen=True)
class RunConfig:
    """A validated run file: the agent plus optional grid and sweep lists.

    `thresholds` maps re-id methods to tau for ablation-grid rows.
    """
    agent: AgentConfig
    ablation_grid: tuple = ()
    taus: tuple = ()
    thresholds: dict = dataclasses.field(default_factory=dict)

    def grid_configs(self):
        """One AgentConfig per ablation row, in file order."""
        rows = self.ablation_grid or ((self.agent.reid_method, self.agent.localization_method),)
        configs = []
        for reid_method, localization_method in rows:
            tau = self.thresholds.get(reid_method)
            if reid_method == self.agent.reid_method and self.agent.tau is not None:
                tau = self.agent.tau
            configs.append(self.agent.with_methods(reid_method, localization_method, tau))
        return configs
