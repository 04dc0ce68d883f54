"""Generalization evaluation: scenario generation, trial runs, reporting.

Categories follow the usual robot-manipulation taxonomy: seen (nominal),
physical (target size/color), motion (target moved, optionally a raised
goal), semantic (instruction noun swapped), visual (distractors or
background). Rates are exact fractions and reports always carry the raw
counts next to any percentage.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .action import (
    DEFAULT_WORKSPACE,
    PlaceGoal,
    SimWorld,
    TaskSpec,
    retarget_task,
    world_from_snapshot,
)
from .control import DEFAULT_HZ, run_control_loop
from .errors import EmptyResults, TargetMissing, ToolforgeError, UnknownCategory
from .policies import PolicyBackend
from .scene import SceneObject, SceneSnapshot

CATEGORIES = ("seen", "physical", "motion", "semantic", "visual")

SIZE_SCALE_RANGE = (0.7, 1.3)
DISTRACTOR_RANGE = (1, 3)
GOAL_ELEVATION_M = 0.05
SEMANTIC_NOUNS = ("banana", "tomato", "cube")
COLOR_PALETTE = ("white", "red", "green", "blue", "yellow")
BACKGROUNDS = ("table", "wood", "cloth", "dark")

# Keeps perturbed and distractor positions away from workspace walls.
EDGE_MARGIN_M = 0.05
# Distractors never spawn this close to the target, so the grasp latch
# cannot pick one up instead of the target.
DISTRACTOR_CLEARANCE_M = 0.1

_ALLOWED_PERTURBATION_KEYS = {
    "seen": set(),
    "physical": {"size_scale", "color_id"},
    "motion": {"position", "goal_elevation_m"},
    "semantic": {"noun"},
    "visual": {"distractors", "background_id"},
}


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    base_task: TaskSpec
    category: str
    perturbation: dict
    seed: int

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise UnknownCategory(f"unknown category {self.category!r}; expected one of {CATEGORIES}")
        allowed = _ALLOWED_PERTURBATION_KEYS[self.category]
        extra = set(self.perturbation) - allowed
        if extra:
            raise ValueError(f"category {self.category!r} does not accept perturbation keys {sorted(extra)}")


@dataclass(frozen=True)
class TrialResult:
    scenario_id: str
    category: str
    task_name: str
    success: bool
    steps_used: int
    # timing is informational; reproducibility compares everything else
    wall_seconds: float = field(compare=False, default=0.0)
    error: str | None = None

    def __post_init__(self):
        if self.error is not None and self.success:
            raise ValueError("a trial with an error cannot be a success")


def reference_snapshot(target_name: str = "cake", scene_id: str = "eval-scene") -> SceneSnapshot:
    """Nominal tabletop scene: the target and a plate on a table."""
    return SceneSnapshot(
        scene_id=scene_id,
        objects=(
            SceneObject(name=target_name, approx_size_mm=80.0,
                        position=(0.55, 0.0, 0.02), color_id="white", is_target=True),
            SceneObject(name="plate", approx_size_mm=180.0,
                        position=(0.7, 0.3, 0.02), color_id="blue"),
        ),
        background_id="table",
    )


def generate_scenarios(task: TaskSpec, category: str, n: int, seed: int) -> list[Scenario]:
    """Draw n deterministic scenarios of one category from a seeded stream."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if category not in CATEGORIES:
        raise UnknownCategory(f"unknown category {category!r}; expected one of {CATEGORIES}")
    rng = random.Random(seed)
    scenarios = []
    for i in range(n):
        perturbation = _draw_perturbation(category, task, rng)
        scenarios.append(
            Scenario(
                scenario_id=f"{category}-{seed}-{i:04d}",
                base_task=task,
                category=category,
                perturbation=perturbation,
                seed=rng.getrandbits(31),
            )
        )
    return scenarios


def _draw_perturbation(category: str, task: TaskSpec, rng: random.Random) -> dict:
    if category == "seen":
        return {}
    if category == "physical":
        kind = rng.choice(("size", "color", "both"))
        perturbation: dict = {}
        if kind in ("size", "both"):
            perturbation["size_scale"] = rng.uniform(*SIZE_SCALE_RANGE)
        if kind in ("color", "both"):
            perturbation["color_id"] = rng.choice([c for c in COLOR_PALETTE if c != "white"])
        return perturbation
    if category == "motion":
        ws = DEFAULT_WORKSPACE
        x = rng.uniform(ws.min[0] + EDGE_MARGIN_M, ws.max[0] - EDGE_MARGIN_M)
        y = rng.uniform(ws.min[1] + EDGE_MARGIN_M, ws.max[1] - EDGE_MARGIN_M)
        perturbation = {"position": (x, y, 0.02)}
        if isinstance(task.goal, PlaceGoal) and rng.random() < 0.5:
            perturbation["goal_elevation_m"] = GOAL_ELEVATION_M
        return perturbation
    if category == "semantic":
        return {"noun": rng.choice(SEMANTIC_NOUNS)}
    if category == "visual":
        kind = rng.choice(("distractors", "background", "both"))
        perturbation = {}
        if kind in ("distractors", "both"):
            count = rng.randint(*DISTRACTOR_RANGE)
            perturbation["distractors"] = [
                {
                    "name": f"distractor_{j + 1}",
                    "color_id": rng.choice(COLOR_PALETTE),
                    "size_mm": rng.uniform(30.0, 60.0),
                    "offset": (rng.uniform(-0.25, 0.25), rng.uniform(-0.35, 0.35)),
                }
                for j in range(count)
            ]
        if kind in ("background", "both"):
            perturbation["background_id"] = rng.choice([b for b in BACKGROUNDS if b != "table"])
        return perturbation
    raise UnknownCategory(f"unknown category {category!r}")


def build_world(scenario: Scenario) -> tuple[SimWorld, TaskSpec]:
    """Materialize the scenario into a simulated world plus its task."""
    task = scenario.base_task
    snapshot = reference_snapshot(target_name=task.target_object,
                                  scene_id=scenario.scenario_id)
    world = world_from_snapshot(snapshot)
    target = world.object_by_name(task.target_object)
    assert target is not None
    p = scenario.perturbation

    if scenario.category == "physical":
        if "size_scale" in p:
            target.size_mm = target.size_mm * float(p["size_scale"])
        if "color_id" in p:
            target.color_id = p["color_id"]
    elif scenario.category == "motion":
        target.position = world.workspace.clamp(tuple(p["position"]))
        if "goal_elevation_m" in p and isinstance(task.goal, PlaceGoal):
            gx, gy, gz = task.goal.position
            raised = PlaceGoal(position=(gx, gy, gz + float(p["goal_elevation_m"])),
                               tolerance_m=task.goal.tolerance_m)
            task = replace(task, goal=raised)
    elif scenario.category == "semantic":
        noun = p["noun"]
        instruction = task.instruction.replace(task.target_object, noun)
        target.name = noun
        task = retarget_task(task, target_object=noun, instruction=instruction)
    elif scenario.category == "visual":
        ws = world.workspace
        for spec in p.get("distractors", ()):
            ox, oy = spec["offset"]
            pos = ws.clamp((target.position[0] + ox, target.position[1] + oy, 0.02))
            if _dist2(pos, target.position) < DISTRACTOR_CLEARANCE_M**2:
                pos = _push_clear(target.position, ws)
            world.objects.append(
                _distractor(spec["name"], pos, spec["size_mm"], spec["color_id"])
            )
        if "background_id" in p:
            world.background_id = p["background_id"]
    return world, task


def _distractor(name, position, size_mm, color_id):
    from .action import SimObject

    return SimObject(name=name, position=position, size_mm=size_mm, color_id=color_id)


def _push_clear(target, workspace):
    """Deterministic position just over the clearance radius from target.

    Tries axis-aligned pushes in a fixed order; the workspace spans well over
    twice the clearance on x and y, so at least one candidate survives its
    clamp without re-entering the clearance disc.
    """
    reach = DISTRACTOR_CLEARANCE_M * 1.05
    tx, ty, _tz = target
    for dx, dy in ((reach, 0.0), (-reach, 0.0), (0.0, reach), (0.0, -reach)):
        pos = workspace.clamp((tx + dx, ty + dy, 0.02))
        if _dist2(pos, target) >= DISTRACTOR_CLEARANCE_M**2:
            return pos
    raise AssertionError("workspace too small for distractor clearance")


def _dist2(a, b) -> float:
    return sum((x - y) ** 2 for x, y in zip(a, b))


def run_trials(
    policy: PolicyBackend, scenarios: list[Scenario], hz: float = DEFAULT_HZ
) -> list[TrialResult]:
    """One fast-mode rollout per scenario; per-trial errors never abort the batch."""
    results = []
    for scenario in scenarios:
        world, task = build_world(scenario)
        try:
            episode = run_control_loop(
                policy, world, task, hz=hz, mode="fast", seed=scenario.seed
            )
            error = episode.metadata.get("error")
            results.append(
                TrialResult(
                    scenario_id=scenario.scenario_id,
                    category=scenario.category,
                    task_name=task.task_name,
                    success=episode.success and error is None,
                    steps_used=len(episode.steps),
                    wall_seconds=episode.wall_seconds,
                    error=error,
                )
            )
        except (ToolforgeError, TargetMissing) as exc:
            results.append(
                TrialResult(
                    scenario_id=scenario.scenario_id,
                    category=scenario.category,
                    task_name=task.task_name,
                    success=False,
                    steps_used=0,
                    wall_seconds=0.0,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return results


@dataclass(frozen=True)
class CategoryStats:
    trials: int
    successes: int

    @property
    def rate(self) -> Fraction:
        return Fraction(self.successes, self.trials)


@dataclass(frozen=True)
class SuccessReport:
    per_category: dict
    per_task: dict
    timing: dict = field(default_factory=dict)


def aggregate_report(results: list[TrialResult], timings: dict | None = None) -> SuccessReport:
    """Fold trial results into exact per-category and per-task rates.

    ``timings`` maps a pipeline stage name to a list of seconds (meaned)
    or to a single precomputed mean.
    """
    if not results:
        raise EmptyResults("no trial results to aggregate")
    per_category: dict[str, CategoryStats] = {}
    per_task: dict[str, CategoryStats] = {}
    for bucket, key_of in ((per_category, lambda r: r.category), (per_task, lambda r: r.task_name)):
        for r in results:
            key = key_of(r)
            stats = bucket.get(key, CategoryStats(0, 0))
            bucket[key] = CategoryStats(stats.trials + 1, stats.successes + (1 if r.success else 0))
    timing = {}
    if timings:
        for stage, seconds in timings.items():
            values = [seconds] if isinstance(seconds, (int, float)) else list(seconds)
            timing[stage] = sum(values) / len(values) if values else 0.0
    return SuccessReport(per_category=per_category, per_task=per_task, timing=timing)


def format_rate(stats: CategoryStats | None) -> str:
    """Render a rate as percent plus raw counts; absent data renders n/a."""
    if stats is None or stats.trials == 0:
        return "n/a"
    percent = float(stats.rate) * 100.0
    return f"{percent:.0f}% ({stats.successes}/{stats.trials})"


def render_report(report: SuccessReport, format: str = "text") -> str:
    if format == "text":
        return _render_text(report)
    if format == "csv":
        return _render_csv(report)
    raise ValueError(f"format must be 'text' or 'csv', got {format!r}")


def _render_text(report: SuccessReport) -> str:
    lines = []
    lines.append(f"{'Task':<24}{'Success Rate':<20}{'Average Inference Time':<24}")
    timing_text = _timing_summary(report.timing)
    for task_name in sorted(report.per_task):
        stats = report.per_task[task_name]
        lines.append(f"{task_name:<24}{format_rate(stats):<20}{timing_text:<24}")
    lines.append("")
    lines.append(f"{'Category':<24}{'Success Rate':<20}")
    for category in CATEGORIES:
        stats = report.per_category.get(category)
        lines.append(f"{category:<24}{format_rate(stats):<20}")
    if report.timing:
        lines.append("")
        lines.append(f"{'Stage':<24}{'Mean Seconds':<20}")
        for stage in sorted(report.timing):
            lines.append(f"{stage:<24}{report.timing[stage]:<20.3f}")
    return "\n".join(line.rstrip() for line in lines) + "\n"


def _timing_summary(timing: dict) -> str:
    if not timing:
        return "n/a"
    total = sum(timing.values())
    return f"{total:.1f} s"


CSV_HEADER = ("section", "name", "trials", "successes", "rate_percent", "mean_seconds")


def _render_csv(report: SuccessReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for task_name in sorted(report.per_task):
        stats = report.per_task[task_name]
        writer.writerow(["task", task_name, stats.trials, stats.successes,
                         repr(float(stats.rate) * 100.0), ""])
    for category in CATEGORIES:
        stats = report.per_category.get(category)
        if stats is None:
            writer.writerow(["category", category, "", "", "", ""])
        else:
            writer.writerow(["category", category, stats.trials, stats.successes,
                             repr(float(stats.rate) * 100.0), ""])
    for stage in sorted(report.timing):
        writer.writerow(["timing", stage, "", "", "", repr(report.timing[stage])])
    return buf.getvalue()
