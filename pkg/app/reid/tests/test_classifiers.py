"""
Tests for re-identification scores and decisions.
"""
import numpy as np
from django.test import SimpleTestCase

from reid.calibration import calibrate_threshold
from reid.classifiers import (
    CONF_SUM,
    GLOBAL_EMBED,
    MATCH_COUNT,
    ORACLE,
    ReidClassifier,
    reid_oracle,
    reid_score,
    score_matches,
)
from reid.features import FeatureParams, MatchSet

PARAMS = FeatureParams(pattern_seed=11)


def create_texture(seed=0):
    return np.random.default_rng(seed).integers(0, 256, size=(80, 80, 3), dtype=np.uint8)


class ScoreTests(SimpleTestCase):
    """Test re-id scores."""

    def test_empty_matches(self):
        """Test no matches score zero."""
        self.assertEqual(score_matches(MatchSet(), CONF_SUM), 0.0)
        self.assertEqual(score_matches(MatchSet(), MATCH_COUNT), 0.0)

    def test_match_definitions(self):
        """Test conf-sum adds confidences and match-count counts pairs."""
        matches = MatchSet(pairs=np.array([[0, 0], [1, 1]]),
                           confidences=np.array([0.5, 0.25]))

        self.assertEqual(score_matches(matches, MATCH_COUNT), 2.0)
        self.assertEqual(score_matches(matches, CONF_SUM), 0.75)

    def test_identical_images(self):
        """Test self-similarity under each method."""
        image = create_texture()

        embed_score, matches = reid_score(image, image, GLOBAL_EMBED, PARAMS)
        conf, conf_matches = reid_score(image, image, CONF_SUM, PARAMS)
        count, _ = reid_score(image, image, MATCH_COUNT, PARAMS)

        self.assertAlmostEqual(embed_score, 1.0)
        self.assertIsNone(matches)
        self.assertEqual(conf, count)
        self.assertEqual(len(conf_matches), count)

    def test_unknown_method(self):
        """Test unknown methods raise."""
        with self.assertRaises(ValueError):
            reid_score(create_texture(), create_texture(), 'sift', PARAMS)


class OracleTests(SimpleTestCase):
    """Test the ground-truth re-id."""

    def test_one_pixel_positive(self):
        """Test one goal pixel is enough."""
        ids = np.zeros((4, 4), dtype=np.int32)
        ids[2, 1] = 7

        decision = reid_oracle(ids, 7)

        self.assertTrue(decision.positive)
        self.assertEqual(decision.score, 1.0)

    def test_absent_negative(self):
        """Test no goal pixels is negative."""
        self.assertFalse(reid_oracle(np.full((4, 4), 3), 7).positive)


class ClassifierTests(SimpleTestCase):
    """Test thresholded decisions."""

    def test_threshold_required(self):
        """Test scored methods need tau."""
        with self.assertRaises(ValueError):
            ReidClassifier(CONF_SUM, None, PARAMS)
        ReidClassifier(ORACLE, None, PARAMS)

    def test_goal_required(self):
        """Test deciding before the goal is set raises."""
        with self.assertRaises(ValueError):
            ReidClassifier(GLOBAL_EMBED, 0.5, PARAMS).decide(create_texture())

    def test_threshold_inclusive(self):
        """Test a score equal to tau is positive."""
        image = create_texture(3)
        score, _ = reid_score(image, image, GLOBAL_EMBED, PARAMS)
        classifier = ReidClassifier(GLOBAL_EMBED, score, PARAMS)
        classifier.set_goal(image)

        decision, _ = classifier.decide(image.copy())

        self.assertTrue(decision.positive)

    def test_negative_below_tau(self):
        """Test unrelated textures fall below a high keypoint threshold."""
        classifier = ReidClassifier(CONF_SUM, 50.0, PARAMS)
        classifier.set_goal(create_texture(4))

        decision, matches = classifier.decide(create_texture(5))

        self.assertFalse(decision.positive)
        self.assertEqual(decision.score, matches.confidence_sum)

    def test_oracle_decision(self):
        """Test the oracle ignores images and reads labels."""
        classifier = ReidClassifier(ORACLE)
        ids = np.zeros((3, 3), dtype=np.int32)
        ids[1, 1] = 2

        decision, matches = classifier.decide(None, ids, 2)

        self.assertTrue(decision.positive)
        self.assertIsNone(matches)


class NoiseTextureTests(SimpleTestCase):
    """Test unrelated textures stay below a calibrated conf-sum threshold."""

    def conf_sum(self, goal, ego):
        return reid_score(goal, ego, CONF_SUM, PARAMS)[0]

    def test_independent_noise_below_threshold(self):
        """Test 95 of 100 independent-noise pairs score under tau."""
        labels, scores = [], []
        for seed in range(20):
            texture = create_texture(1000 + seed)
            labels += [True, False]
            scores += [self.conf_sum(texture, np.roll(texture, 3, axis=1)),
                       self.conf_sum(texture, create_texture(2000 + seed))]
        tau = calibrate_threshold(labels, scores, CONF_SUM).tau_star

        below = sum(
            self.conf_sum(create_texture(3000 + k), create_texture(4000 + k)) < tau
            for k in range(100)
        )

        self.assertGreater(tau, 0.0)
        self.assertGreaterEqual(below, 95)
