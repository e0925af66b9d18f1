"""Trainers for both stages, with resumable on-disk checkpoints.

A checkpoint is a directory holding config.json (stage + model + optimizer
configuration), weights.bin (versioned torch payload) and log.jsonl
(per-epoch loss components and periodic train-subset metrics).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from ..data import Corpus, NoiseConfig, perturb_primitives
from ..errors import ConfigError, DivergenceError
from ..metrics import constraint_metrics, primitive_metrics
from .constraint import ConstraintModelConfig, ConstraintNet, constraint_batch_loss
from .primitive import PrimitiveModelConfig, PrimitiveNet, primitive_batch_loss

FORMAT_VERSION = 1


@dataclass
class OptimConfig:
    epochs: int = 100
    batch_size: int = 16
    lr: float = 1e-3
    lr_step: int = 60  # epochs between step decays
    lr_gamma: float = 0.5
    grad_clip: float = 1.0
    seed: int = 0
    metrics_every: int = 20  # train-subset metric cadence, 0 disables
    save_every: int = 10


def _config_payload(stage: str, model_cfg, optim_cfg: OptimConfig) -> str:
    payload = {
        "stage": stage,
        "model": dataclasses.asdict(model_cfg),
        "optim": dataclasses.asdict(optim_cfg),
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def checkpoint_id(ckpt_dir: str | Path) -> str:
    text = (Path(ckpt_dir) / "config.json").read_bytes()
    return hashlib.sha256(text).hexdigest()[:12]


def load_checkpoint_config(ckpt_dir: str | Path) -> dict:
    return json.loads((Path(ckpt_dir) / "config.json").read_text())


def _model_config_from(payload: dict):
    if payload["stage"] == "primitive":
        return PrimitiveModelConfig(**payload["model"])
    if payload["stage"] == "constraint":
        return ConstraintModelConfig(**payload["model"])
    raise ConfigError(f"unknown checkpoint stage {payload['stage']!r}")


def load_model(ckpt_dir: str | Path):
    """Rebuild the model (eval mode) from a checkpoint directory."""
    payload = load_checkpoint_config(ckpt_dir)
    cfg = _model_config_from(payload)
    blob = torch.load(Path(ckpt_dir) / "weights.bin", map_location="cpu", weights_only=True)
    if blob.get("format_version") != FORMAT_VERSION:
        raise ConfigError(f"unsupported weights format {blob.get('format_version')!r}")
    model = PrimitiveNet(cfg) if payload["stage"] == "primitive" else ConstraintNet(cfg)
    model.load_state_dict(blob["model_state"])
    model.eval()
    return model, cfg, payload["stage"]


class _Run:
    """Shared checkpointing / logging / resume machinery for both trainers."""

    def __init__(self, stage: str, model, model_cfg, optim_cfg: OptimConfig, out_dir: str | Path, resume: bool):
        self.stage = stage
        self.model = model
        self.optim_cfg = optim_cfg
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.optimizer = torch.optim.Adam(model.parameters(), lr=optim_cfg.lr)
        self.scheduler = torch.optim.lr_scheduler.StepLR(
            self.optimizer, step_size=optim_cfg.lr_step, gamma=optim_cfg.lr_gamma
        )
        self.start_epoch = 0
        self.log: list[dict] = []
        weights = self.dir / "weights.bin"
        if resume and weights.exists():
            blob = torch.load(weights, map_location="cpu", weights_only=True)
            model.load_state_dict(blob["model_state"])
            self.optimizer.load_state_dict(blob["optim_state"])
            self.scheduler.load_state_dict(blob["scheduler_state"])
            self.start_epoch = blob["epoch"] + 1
            log_path = self.dir / "log.jsonl"
            if log_path.exists():
                self.log = [json.loads(line) for line in log_path.read_text().splitlines() if line.strip()]
        else:
            (self.dir / "config.json").write_text(_config_payload(stage, model.cfg, optim_cfg))
            (self.dir / "log.jsonl").write_text("")

    def step(self, loss: torch.Tensor):
        if not math.isfinite(float(loss.detach())):
            raise DivergenceError(f"{self.stage} training diverged: loss={float(loss.detach())}")
        self.optimizer.zero_grad()
        loss.backward()
        if self.optim_cfg.grad_clip > 0:
            torch.nn.utils.clip_grad_norm_(self.model.parameters(), self.optim_cfg.grad_clip)
        self.optimizer.step()

    def end_epoch(self, epoch: int, components: dict[str, float], metrics: dict | None):
        self.scheduler.step()
        rec = {
            "epoch": epoch,
            "loss": components,
            "lr": self.optimizer.param_groups[0]["lr"],
            "time": time.time(),
        }
        if metrics:
            rec["metrics"] = metrics
        self.log.append(rec)
        with open(self.dir / "log.jsonl", "a") as f:
            f.write(json.dumps(rec) + "\n")
        last = epoch == self.optim_cfg.epochs - 1
        if last or (self.optim_cfg.save_every and (epoch + 1) % self.optim_cfg.save_every == 0):
            self.save(epoch)

    def save(self, epoch: int):
        torch.save(
            {
                "format_version": FORMAT_VERSION,
                "stage": self.stage,
                "epoch": epoch,
                "model_state": self.model.state_dict(),
                "optim_state": self.optimizer.state_dict(),
                "scheduler_state": self.scheduler.state_dict(),
            },
            self.dir / "weights.bin",
        )


def _epoch_order(seed: int, epoch: int, n: int) -> np.ndarray:
    return np.random.default_rng([seed, epoch]).permutation(n)


def train_primitive(
    corpus: Corpus,
    cfg: PrimitiveModelConfig,
    optim_cfg: OptimConfig,
    out_dir: str | Path,
    resume: bool = False,
) -> tuple[PrimitiveNet, list[dict]]:
    records = corpus.records()
    if not records:
        raise ConfigError("empty corpus")
    torch.manual_seed(optim_cfg.seed)
    model = PrimitiveNet(cfg)
    run = _Run("primitive", model, cfg, optim_cfg, out_dir, resume)
    images = torch.tensor(np.stack([img for _, img, _ in records]), dtype=torch.float32)
    gts = [list(s.primitives) for _, _, s in records]

    model.train()
    for epoch in range(run.start_epoch, optim_cfg.epochs):
        order = _epoch_order(corpus.seed, epoch, len(records))
        comps_sum: dict[str, float] = {}
        n_batches = 0
        for start in range(0, len(records), optim_cfg.batch_size):
            idx = order[start : start + optim_cfg.batch_size]
            outs = model(images[idx])
            loss, comps = primitive_batch_loss(outs, [gts[i] for i in idx], cfg)
            run.step(loss)
            for k, v in comps.items():
                comps_sum[k] = comps_sum.get(k, 0.0) + v
            n_batches += 1
        comps_mean = {k: v / n_batches for k, v in comps_sum.items()}
        metrics = None
        if optim_cfg.metrics_every and (epoch + 1) % optim_cfg.metrics_every == 0:
            metrics = _quick_primitive_metrics(model, images, gts)
        run.end_epoch(epoch, comps_mean, metrics)
    model.eval()
    return model, run.log


def _quick_primitive_metrics(model: PrimitiveNet, images: torch.Tensor, gts, limit: int = 32) -> dict:
    model.eval()
    with torch.no_grad():
        outs = model(images[:limit])
    accs = [primitive_metrics(gts[i], outs.prediction_set(i), weights=model.cfg.loss_weights) for i in range(min(limit, len(gts)))]
    model.train()
    return {
        "acc_type": float(np.mean([m.acc_type for m in accs])),
        "acc_flag": float(np.mean([m.acc_flag for m in accs])),
        "acc_par": float(np.mean([m.acc_par for m in accs])),
    }


def train_constraint(
    corpus: Corpus,
    cfg: ConstraintModelConfig,
    optim_cfg: OptimConfig,
    out_dir: str | Path,
    regime: str = "noiseless",
    noise: NoiseConfig | None = None,
    resume: bool = False,
) -> tuple[ConstraintNet, list[dict]]:
    """Train the constraint stage on ground-truth primitive lists.

    In the noisy regime, inputs are freshly perturbed each epoch while the
    targets stay the clean constraint lists, teaching the net to bind
    constraints to displaced primitives.
    """
    if regime not in ("noiseless", "noisy"):
        raise ConfigError(f"unknown regime {regime!r}")
    records = corpus.records()
    if not records:
        raise ConfigError("empty corpus")
    noise = noise or NoiseConfig()
    torch.manual_seed(optim_cfg.seed)
    model = ConstraintNet(cfg)
    run = _Run("constraint", model, cfg, optim_cfg, out_dir, resume)
    sketches = [s for _, _, s in records]
    gts = [list(s.constraints) for s in sketches]

    model.train()
    for epoch in range(run.start_epoch, optim_cfg.epochs):
        if regime == "noisy":
            inputs = [
                list(
                    perturb_primitives(
                        sketches[i], noise, np.random.default_rng([optim_cfg.seed, epoch, i])
                    ).primitives
                )
                for i in range(len(sketches))
            ]
        else:
            inputs = [list(s.primitives) for s in sketches]
        order = _epoch_order(corpus.seed, epoch, len(records))
        comps_sum: dict[str, float] = {}
        n_batches = 0
        for start in range(0, len(records), optim_cfg.batch_size):
            idx = order[start : start + optim_cfg.batch_size]
            outs = model([inputs[i] for i in idx])
            loss, comps = constraint_batch_loss(outs, [gts[i] for i in idx], cfg)
            run.step(loss)
            for k, v in comps.items():
                comps_sum[k] = comps_sum.get(k, 0.0) + v
            n_batches += 1
        comps_mean = {k: v / n_batches for k, v in comps_sum.items()}
        metrics = None
        if optim_cfg.metrics_every and (epoch + 1) % optim_cfg.metrics_every == 0:
            metrics = _quick_constraint_metrics(model, inputs, gts)
        run.end_epoch(epoch, comps_mean, metrics)
    model.eval()
    return model, run.log


def _quick_constraint_metrics(model: ConstraintNet, inputs, gts, limit: int = 32) -> dict:
    model.eval()
    take = [i for i in range(min(limit, len(gts))) if gts[i]]
    if not take:
        model.train()
        return {}
    with torch.no_grad():
        outs = model([inputs[i] for i in take])
    accs = [
        constraint_metrics(gts[i], outs.prediction_set(k), weights=model.cfg.loss_weights)
        for k, i in enumerate(take)
    ]
    model.train()
    return {
        "acc_type": float(np.mean([m.acc_type for m in accs])),
        "acc_par": float(np.mean([m.acc_par for m in accs])),
    }
