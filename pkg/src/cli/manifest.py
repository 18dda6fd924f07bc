"""Run manifest attached to every CLI document"""

import argparse
from dataclasses import asdict, dataclass, field
from typing import Optional

from src import __version__
from src.utils import file_checksum

# flags that change where output goes, not what it contains
PRESENTATION_FLAGS = ("handler", "json", "out", "verbose")


@dataclass(frozen=True)
class RunManifest:
    """Command, configuration, seed, version and input checksum of one run"""

    command: str
    config: dict = field(default_factory=dict)
    seed: int = 0
    version: str = __version__
    input_path: Optional[str] = None
    input_sha256: Optional[str] = None

    @classmethod
    def for_run(
        cls, args: argparse.Namespace, input_path: Optional[str] = None
    ) -> "RunManifest":
        config = {
            key: value
            for key, value in sorted(vars(args).items())
            if key not in PRESENTATION_FLAGS
        }
        return cls(
            command=args.command,
            config=config,
            seed=args.seed,
            input_path=input_path,
            input_sha256=file_checksum(input_path) if input_path else None,
        )

    def to_dict(self) -> dict:
        return asdict(self)
