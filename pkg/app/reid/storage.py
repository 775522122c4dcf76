"""
Pair manifests, threshold reports and curve tables on disk.
"""
import os

from core.csvio import write_csv
from core.imageio import read_image, write_ppm
from core.jsonio import read_json, read_jsonl, write_json, write_jsonl
from core.serializers import load
from reid.calibration import CalibrationDataset
from reid.serializers import PairSerializer, SceneSplitSerializer, ThresholdReportSerializer


def save_dataset(dataset: CalibrationDataset, path):
    """Manifest as JSON lines, images as PPM in `<stem>_images/`."""
    base_dir = os.path.dirname(os.path.abspath(path))
    stem = os.path.splitext(os.path.basename(path))[0]
    for ref, rgb in sorted(dataset.images.items()):
        write_ppm(os.path.join(base_dir, f'{stem}_images', f'{ref}.ppm'), rgb)
    write_jsonl(path, [PairSerializer(p).data for p in dataset.pairs])
    return path


def load_dataset(path) -> CalibrationDataset:
    base_dir = os.path.dirname(os.path.abspath(path))
    stem = os.path.splitext(os.path.basename(path))[0]
    pairs = [load(PairSerializer, record) for record in read_jsonl(path)]
    refs = sorted({p.image_a for p in pairs} | {p.image_b for p in pairs})
    images = {
        ref: read_image(os.path.join(base_dir, f'{stem}_images', f'{ref}.ppm'))
        for ref in refs
    }
    return CalibrationDataset(pairs=sorted(pairs, key=lambda p: p.pair_id), images=images)


def save_split(split, path):
    write_json(path, SceneSplitSerializer(split).data)
    return path


def load_split(path):
    return load(SceneSplitSerializer, read_json(path))


def save_report(report, path):
    write_json(path, ThresholdReportSerializer(report).data)
    return path


def load_report(path):
    return load(ThresholdReportSerializer, read_json(path))


def write_curves(report, path):
    rows = zip(
        report.thresholds.tolist(), report.precision.tolist(),
        report.recall.tolist(), report.f_measure.tolist(),
    )
    return write_csv(path, ['threshold', 'precision', 'recall', 'f_measure'], rows)


def write_scores(dataset, scores, path):
    rows = [
        (p.pair_id, p.image_a, p.image_b, int(p.same_instance), float(s))
        for p, s in zip(sorted(dataset.pairs, key=lambda p: p.pair_id), scores)
    ]
    return write_csv(path, ['pair_id', 'image_a', 'image_b', 'same_instance', 'score'], rows)


def write_ranking(rows, path):
    return write_csv(path, ['rank', 'method', 'max_f', 'tau_star', 'pr_auc'], rows)
