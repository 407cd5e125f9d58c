"""Bridge test fixtures: a tiny, deterministic local NSP checkpoint.

The checkpoint has randomly initialized (seeded) weights, which is enough to
exercise protocol, range, batching, and determinism. Semantic quality tests
need a real pretrained checkpoint and are gated on NSP_SANITY_MODEL.
"""

import pytest

VOCAB_WORDS = [
    "the", "a", "an", "warm", "honey", "tea", "soothes", "sore", "throat",
    "before", "bed", "night", "lemon", "rest", "alien", "arcade", "game",
    "ship", "waves", "player", "defends", "cities", "from", "invaders",
    "water", "salt", "gargle", "helps", "heal", "quickly", "slowly", "and",
]


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    import torch
    from transformers import BertConfig, BertForNextSentencePrediction, BertTokenizerFast

    out = tmp_path_factory.mktemp("ckpt") / "tiny-nsp"
    vocab_path = tmp_path_factory.mktemp("vocab") / "vocab.txt"
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + VOCAB_WORDS
    vocab_path.write_text("\n".join(vocab), encoding="utf-8")

    tokenizer = BertTokenizerFast(vocab_file=str(vocab_path), do_lower_case=True)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    torch.manual_seed(1234)
    model = BertForNextSentencePrediction(config)
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    return str(out)
