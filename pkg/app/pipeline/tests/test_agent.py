"""
Tests for the agent's mode machine and goal bookkeeping.
"""
import dataclasses
import math
from unittest.mock import patch

from django.test import SimpleTestCase

from core.exceptions import EmptyGoal, ExplorationExhausted
from core.geometry import CameraModel, Pose
from pipeline.agent import Agent, GoalContext, Mode
from pipeline.config import LOCALIZE_ORACLE, AgentConfig
from pipeline.runner import run_episode
from planner.actions import Action
from reid.classifiers import GLOBAL_EMBED, ORACLE, ReidDecision
from simworld.simulator import Simulator
from simworld.testing import create_episode, create_scene

# facing the chair from across the room
FACING_CHAIR = Pose(3.25, 0.75, math.pi)


def create_config(reid_method=ORACLE, tau=None, budget=40):
    config = AgentConfig.from_settings(
        reid_method=reid_method, localization_method=LOCALIZE_ORACLE,
        tau=tau, budget=budget,
    )
    return dataclasses.replace(
        config, camera=CameraModel(48, 27, math.radians(42.0), 1.31, 0.0),
    )


def create_agent(scene, episode, config):
    sim = Simulator(
        scene, config.camera, config.agent_radius, config.forward_step,
        config.turn_angle, config.render,
    )
    obs = sim.reset(episode)
    agent = Agent(config, GoalContext(
        goal_rgb=episode.goal.render.rgb,
        goal_ids=episode.goal.render.instance_ids,
        goal_instance_id=episode.goal_instance_id,
        goal_category=episode.goal_category,
        categories=scene.categories,
    ))
    return agent, obs


def positive(score):
    return ReidDecision(positive=True, score=score, method=ORACLE), None


class DetectionTests(SimpleTestCase):
    """Test how re-identification drives the goal channel."""

    def setUp(self):
        self.scene = create_scene()
        self.episode = create_episode(self.scene, start=FACING_CHAIR)
        self.agent, self.obs = create_agent(self.scene, self.episode, create_config())

    def test_first_positive_localizes(self):
        """Test a visible goal switches to goal pursuit on the first frame."""
        action, info = self.agent.step(self.obs)

        self.assertTrue(info.positive)
        self.assertIn('localized', info.events)
        self.assertIs(info.mode, Mode.GOTO_GOAL)
        self.assertEqual(self.agent.state.best.step, 0)
        self.assertTrue(self.agent.state.map.goal.any())
        self.assertIsNot(action, Action.STOP)

    @patch('pipeline.agent.localize_oracle', side_effect=EmptyGoal('no goal points'))
    def test_empty_goal_keeps_exploring(self, patched_localize):
        """Test a positive without goal points is logged and ignored."""
        _, info = self.agent.step(self.obs)

        patched_localize.assert_called_once()
        self.assertTrue(info.positive)
        self.assertIn('false_positive', info.events)
        self.assertIs(info.mode, Mode.EXPLORE)
        self.assertIsNone(self.agent.state.best)
        self.assertFalse(self.agent.state.map.goal.any())

    def test_higher_score_replaces_goal(self):
        """Test only a stronger positive re-localizes the goal."""
        decisions = [positive(1.0), positive(2.0), positive(0.5)]
        with patch.object(self.agent.classifier, 'decide', side_effect=decisions):
            _, first = self.agent.step(self.obs)
            _, second = self.agent.step(self.obs)
            _, third = self.agent.step(self.obs)

        self.assertIn('localized', first.events)
        self.assertIn('relocalized', second.events)
        self.assertNotIn('localized', third.events)
        self.assertNotIn('relocalized', third.events)
        best = self.agent.state.best
        self.assertEqual((best.step, best.score), (1, 2.0))

    @patch('pipeline.agent.select_exploration_target',
           side_effect=ExplorationExhausted('no frontier'))
    def test_exhausted_map_stops(self, patched_select):
        """Test an agent without frontiers or goal stops."""
        agent, obs = create_agent(
            self.scene, self.episode, create_config(GLOBAL_EMBED, tau=2.0),
        )

        action, info = agent.step(obs)

        self.assertIs(action, Action.STOP)
        self.assertEqual(info.events, ['exhausted'])
        self.assertIs(info.mode, Mode.EXPLORE)


class EpisodeTests(SimpleTestCase):
    """Test whole episodes through the agent's modes."""

    def setUp(self):
        self.scene = create_scene()

    def test_goal_in_view_succeeds(self):
        """Test a start facing the goal localizes at once and succeeds."""
        episode = create_episode(self.scene, start=FACING_CHAIR)

        outcome = run_episode(self.scene, episode, create_config())

        self.assertTrue(outcome.success)
        self.assertTrue(outcome.stopped)
        self.assertTrue(outcome.trajectory[0].positive)
        self.assertIn('localized', outcome.trajectory[0].events)
        self.assertEqual(outcome.goal_step, 0)
        self.assertEqual(outcome.trajectory[-1].action, 'stop')
        self.assertLessEqual(outcome.stop_distance, 1.0)
        self.assertNotIn('exhausted', outcome.trajectory[-1].events)

    def test_modes_only_move_forward(self):
        """Test explore never follows goal pursuit and STOP ends the run."""
        episode = create_episode(self.scene, start=FACING_CHAIR.rotate(math.pi))

        outcome = run_episode(self.scene, episode, create_config())

        modes = [record.mode for record in outcome.trajectory]
        self.assertIn('goto_goal', modes)
        first_goal = modes.index('goto_goal')
        self.assertEqual(set(modes[first_goal:]), {'goto_goal'})
        self.assertEqual(set(modes[:first_goal]), {'explore'} if first_goal else set())
        self.assertEqual(outcome.trajectory[-1].action, 'stop')
        actions = [record.action for record in outcome.trajectory]
        self.assertEqual(actions.count('stop'), 1)

    def test_reid_never_fires(self):
        """Test an unreachable threshold runs the budget out and fails."""
        episode = create_episode(self.scene, start=FACING_CHAIR)

        outcome = run_episode(self.scene, episode, create_config(GLOBAL_EMBED, tau=2.0,
                                                                 budget=5))

        self.assertEqual(outcome.steps_taken, 5)
        self.assertTrue(outcome.max_steps)
        self.assertFalse(outcome.stopped)
        self.assertFalse(outcome.success)
        self.assertFalse(any(record.positive for record in outcome.trajectory))
        self.assertEqual({record.mode for record in outcome.trajectory}, {'explore'})
        self.assertIsNone(outcome.goal_step)
