"""
ModelConfig
Architecture hyper-parameters of HierarchyNet plus the ablation switches.
"""
from dataclasses import asdict, dataclass, field, fields

from hierarchynet.modules.graph.dependences import EdgeFlags
from hierarchynet.utils.errors import ConfigError

GATING_MODES = ("scalar", "vector")
DECODING_MODES = ("serial", "gating_only", "concat")
TREE_POOLING = ("attention", "max")


@dataclass
class ModelConfig:
    d: int = 64
    enc_layers: int = 2
    dec_layers: int = 2
    tbcnn_layers: int = 1
    hgt_layers: int = 2
    heads: int = 4
    ffn_mult: int = 4
    src_vocab: int = 0            # source BPE vocabulary (node tokens)
    type_vocab: int = 0           # grammar node types
    tgt_vocab: int = 0            # target BPE vocabulary (summaries)
    max_src_len: int = 512
    max_tgt_len: int = 32
    gating_mode: str = "scalar"
    decoding: str = "serial"
    tree_pooling: str = "attention"
    edges: EdgeFlags = field(default_factory=EdgeFlags)
    reverse_edges: bool = True
    use_subtrees: bool = True
    use_graph: bool = True
    use_haca: bool = True
    use_token_selector: bool = True
    identity_fc: bool = False     # f_c = identity, for gating-convexity checks
    seed: int = 0

    @property
    def d_k(self) -> int:
        return self.d // self.heads

    @property
    def d_ff(self) -> int:
        return self.d * self.ffn_mult

    def validate(self) -> "ModelConfig":
        if self.d <= 0 or self.heads <= 0 or self.d % self.heads:
            raise ConfigError(f"d={self.d} must be a positive multiple of heads={self.heads}")
        if self.d % 2:
            raise ConfigError(f"d={self.d} must be even (token and type embeddings are d/2 each)")
        for name in ("enc_layers", "dec_layers", "tbcnn_layers", "hgt_layers", "ffn_mult",
                     "max_src_len", "max_tgt_len"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.gating_mode not in GATING_MODES:
            raise ConfigError(f"gating_mode must be one of {GATING_MODES}, got '{self.gating_mode}'")
        if self.decoding not in DECODING_MODES:
            raise ConfigError(f"decoding must be one of {DECODING_MODES}, got '{self.decoding}'")
        if self.tree_pooling not in TREE_POOLING:
            raise ConfigError(f"tree_pooling must be one of {TREE_POOLING}, got '{self.tree_pooling}'")
        if self.use_graph and not self.use_subtrees:
            raise ConfigError("the graph layer needs subtree embeddings (use_subtrees)")
        self.edges.validate(graph_enabled=self.use_graph)
        return self

    def require_vocab(self) -> None:
        for name in ("src_vocab", "type_vocab", "tgt_vocab"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} is unset; build the vocabularies first")

    def to_dict(self) -> dict:
        data = asdict(self)
        data["edges"] = self.edges.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown model config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if isinstance(kwargs.get("edges"), dict):
            kwargs["edges"] = EdgeFlags.from_dict(kwargs["edges"])
        return cls(**kwargs)


def full_size_config(**overrides) -> ModelConfig:
    """Full-width architecture: 768 wide, 12 encoder/decoder layers, 1 TBCNN and 2 HGT layers."""
    base = dict(d=768, enc_layers=12, dec_layers=12, tbcnn_layers=1, hgt_layers=2, heads=12,
                max_src_len=512, max_tgt_len=32)
    base.update(overrides)
    return ModelConfig(**base)
