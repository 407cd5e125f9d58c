"""Model loading and batched pair scoring.

p_isnext is the softmax probability of the "is next" class (index 0 of the
two-class successor head) for the ordered pair (text_a, text_b). Pairs
longer than the sequence budget are truncated longest-first so both texts
stay represented.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class BridgeConfig:
    model: str
    max_seq_len: int = 512
    batch_size: int = 16
    device: str = "auto"
    deterministic: bool = True

    def validate(self) -> None:
        if self.max_seq_len < 16:
            raise ValueError(f"max_seq_len must be >= 16, got {self.max_seq_len}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


class ModelLoadError(Exception):
    """The configured checkpoint cannot serve two-class successor scores."""


class NspScorer:
    """Pretrained transformer with a next-sentence-prediction head.

    Refuses checkpoints whose successor head is absent or freshly
    initialized: a random head would emit scores that look valid but mean
    nothing.
    """

    def __init__(self, config: BridgeConfig):
        config.validate()
        import torch
        from transformers import AutoModelForNextSentencePrediction, AutoTokenizer
        from transformers.utils import logging as hf_logging

        hf_logging.set_verbosity_error()
        hf_logging.disable_progress_bar()

        self.config = config
        self.torch = torch
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(config.model)
            self.model, loading_info = AutoModelForNextSentencePrediction.from_pretrained(
                config.model, output_loading_info=True
            )
        except (OSError, ValueError, EnvironmentError) as exc:
            raise ModelLoadError(f"cannot load NSP model {config.model!r}: {exc}") from exc

        missing = [k for k in loading_info.get("missing_keys", []) if "seq_relationship" in k]
        if missing:
            raise ModelLoadError(
                f"checkpoint {config.model!r} has no pretrained successor head "
                f"(missing {missing}); refusing to serve an uninitialized head"
            )

        if config.device == "auto":
            self.device = "cuda" if torch.cuda.is_available() else "cpu"
        else:
            self.device = config.device
        self.model.to(self.device)
        self.model.eval()
        if config.deterministic:
            torch.manual_seed(0)
            torch.use_deterministic_algorithms(True)

    def score(self, pairs: list[tuple[str, str]]) -> list[float]:
        """p_isnext for each ordered (text_a, text_b) pair, batched."""
        torch = self.torch
        out: list[float] = []
        step = self.config.batch_size
        for lo in range(0, len(pairs), step):
            chunk = pairs[lo:lo + step]
            enc = self.tokenizer(
                [a for a, _ in chunk],
                [b for _, b in chunk],
                truncation="longest_first",
                max_length=self.config.max_seq_len,
                padding=True,
                return_tensors="pt",
            ).to(self.device)
            with torch.no_grad():
                logits = self.model(**enc).logits
            probs = torch.softmax(logits.float(), dim=-1)[:, 0]
            out.extend(float(p) for p in probs.cpu())
        return out
