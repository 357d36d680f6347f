import os

import pytest
import torch
from tokenizers import Tokenizer, models, pre_tokenizers, processors
from transformers import (BertConfig, BertForMaskedLM, BertModel,
                          PreTrainedTokenizerFast)

# character-level wordpiece vocab: enough to tokenize the fixture sentences
VOCAB = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + \
    list("abcdefghijklmnopqrstuvwxyz0123456789.") + \
    [f"##{c}" for c in "abcdefghijklmnopqrstuvwxyz0123456789."]


def build_char_tokenizer() -> PreTrainedTokenizerFast:
    vocab = {tok: i for i, tok in enumerate(VOCAB)}
    wp = Tokenizer(models.WordPiece(vocab=vocab, unk_token="[UNK]"))
    wp.pre_tokenizer = pre_tokenizers.Whitespace()
    wp.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])])
    return PreTrainedTokenizerFast(
        tokenizer_object=wp, unk_token="[UNK]", pad_token="[PAD]",
        cls_token="[CLS]", sep_token="[SEP]", mask_token="[MASK]")


def build_tiny_models(root: str) -> tuple[str, str]:
    """Creates a tiny random encoder and masked LM on disk; returns their paths."""
    os.makedirs(root, exist_ok=True)
    tokenizer = build_char_tokenizer()
    config = BertConfig(
        vocab_size=len(VOCAB), hidden_size=16, num_hidden_layers=2,
        num_attention_heads=2, intermediate_size=32,
        max_position_embeddings=128)
    torch.manual_seed(1234)
    encoder_dir = os.path.join(root, "encoder")
    BertModel(config).save_pretrained(encoder_dir)
    tokenizer.save_pretrained(encoder_dir)
    torch.manual_seed(5678)
    mlm_dir = os.path.join(root, "mlm")
    BertForMaskedLM(config).save_pretrained(mlm_dir)
    tokenizer.save_pretrained(mlm_dir)
    return encoder_dir, mlm_dir


@pytest.fixture(scope="session")
def tiny_models(tmp_path_factory):
    root = str(tmp_path_factory.mktemp("tiny-models"))
    return build_tiny_models(root)


@pytest.fixture(scope="session")
def provider(tiny_models):
    from feature_provider import FeatureProvider, ProviderConfig
    encoder_dir, mlm_dir = tiny_models
    return FeatureProvider(ProviderConfig(
        embedding_model=encoder_dir, mlm_model=mlm_dir, batch_size=8))


PRIMARY_FIXTURES = os.path.normpath(os.path.join(
    os.path.dirname(os.path.abspath(__file__)), "..", "..", "tests", "fixtures"))
