"""Dataset manifest model and CSV parsing.

A manifest is a UTF-8 CSV with the exact header
``sample_id,image_path,label,species,device``. ``label`` is ``bona_fide`` or
``attack``; ``species`` must be empty for bona fide rows and one of the four
attack materials otherwise; ``device`` is free text kept as metadata only.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from enum import Enum

from .errors import ManifestError

MANIFEST_HEADER = ("sample_id", "image_path", "label", "species", "device")


class PaiSpecies(str, Enum):
    """The four attack materials; a closed enumeration."""

    ECOFLEX = "ecoflex"
    PLAYDOH = "playdoh"
    PHOTO_PAPER = "photo_paper"
    WOODGLUE = "woodglue"

    @classmethod
    def parse(cls, token: str) -> "PaiSpecies":
        """Parse a species token, case-insensitively; spaces and hyphens map to ``_``."""
        canon = token.strip().lower().replace(" ", "_").replace("-", "_")
        for species in cls:
            if species.value == canon:
                return species
        known = ", ".join(s.value for s in cls)
        raise ValueError(f"unknown species {token!r} (expected one of: {known})")


@dataclass(frozen=True)
class PresentationLabel:
    """Bona fide when ``species`` is None, otherwise an attack of that species."""

    species: PaiSpecies | None = None

    @classmethod
    def attack(cls, species: PaiSpecies) -> "PresentationLabel":
        return cls(species=species)

    @property
    def is_bona_fide(self) -> bool:
        return self.species is None

    @property
    def is_attack(self) -> bool:
        return self.species is not None


BONA_FIDE = PresentationLabel()


class DeviceKind(Enum):
    IPHONE_X = "iphone_x"
    GALAXY_S20 = "galaxy_s20"
    OTHER = "other"


_DEVICE_ALIASES = {
    DeviceKind.IPHONE_X: {"iphonex", "iphone x", "iphone_x", "iphone-x"},
    DeviceKind.GALAXY_S20: {
        "galaxys20",
        "galaxy s20",
        "galaxy_s20",
        "galaxy-s20",
        "samsung galaxy s20",
        "samsung_galaxy_s20",
    },
}


@dataclass(frozen=True)
class CaptureDevice:
    """Capture device; unknown names map to OTHER and are never an error."""

    kind: DeviceKind
    name: str

    @classmethod
    def from_string(cls, raw: str) -> "CaptureDevice":
        norm = raw.strip().lower()
        for kind, aliases in _DEVICE_ALIASES.items():
            if norm in aliases:
                return cls(kind=kind, name=raw)
        return cls(kind=DeviceKind.OTHER, name=raw)


@dataclass(frozen=True)
class SampleRecord:
    sample_id: str
    image_path: str
    label: PresentationLabel
    device: CaptureDevice


@dataclass(frozen=True)
class ManifestSummary:
    """Per-label counts; bona fide plus the four species counts sum to total."""

    bona_fide: int
    species: dict[PaiSpecies, int]

    @property
    def attack_total(self) -> int:
        return sum(self.species.values())

    @property
    def total(self) -> int:
        return self.bona_fide + self.attack_total


@dataclass(frozen=True)
class DatasetManifest:
    """Immutable, ordered collection of samples with unique non-empty ids."""

    samples: tuple[SampleRecord, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for record in self.samples:
            if not record.sample_id:
                raise ManifestError("empty sample_id")
            if record.sample_id in seen:
                raise ManifestError(f"duplicate sample_id {record.sample_id!r}")
            seen.add(record.sample_id)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[SampleRecord]:
        return iter(self.samples)

    @property
    def sample_ids(self) -> tuple[str, ...]:
        return tuple(record.sample_id for record in self.samples)

    def bona_fide_ids(self) -> tuple[str, ...]:
        return tuple(r.sample_id for r in self.samples if r.label.is_bona_fide)

    def summarize(self) -> ManifestSummary:
        """Count bona fide samples and each attack species."""
        species_counts = {species: 0 for species in PaiSpecies}
        bona = 0
        for record in self.samples:
            if record.label.is_bona_fide:
                bona += 1
            else:
                species_counts[record.label.species] += 1
        return ManifestSummary(bona_fide=bona, species=species_counts)

    def filter(self, keep: Callable[[SampleRecord], bool]) -> "DatasetManifest":
        """Subset preserving order; an empty result is legal."""
        return DatasetManifest(samples=tuple(r for r in self.samples if keep(r)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(MANIFEST_HEADER)
        for r in self.samples:
            species = "" if r.label.is_bona_fide else r.label.species.value
            label = "bona_fide" if r.label.is_bona_fide else "attack"
            writer.writerow([r.sample_id, r.image_path, label, species, r.device.name])
        return buf.getvalue()


def parse_manifest(text: str) -> DatasetManifest:
    """Parse and validate a manifest CSV document.

    Raises :class:`ManifestError` with the offending 1-based line number for
    duplicate ids, unknown species tokens and structural problems.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ManifestError("empty document; expected header "
                            + ",".join(MANIFEST_HEADER)) from None
    if tuple(h.strip() for h in header) != MANIFEST_HEADER:
        raise ManifestError(
            f"bad header {','.join(header)!r}; expected {','.join(MANIFEST_HEADER)!r}",
            line=1,
        )

    records: list[SampleRecord] = []
    seen: set[str] = set()
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != len(MANIFEST_HEADER):
            raise ManifestError(
                f"expected {len(MANIFEST_HEADER)} columns, got {len(row)}", line=line
            )
        # sample_id, image_path and device are kept verbatim so that
        # parse -> serialize -> parse is the identity; only the closed
        # token columns (label, species) are normalized.
        sample_id, image_path, label_token, species_token, device = row
        label_token = label_token.strip()
        species_token = species_token.strip()
        if not sample_id:
            raise ManifestError("empty sample_id", line=line)
        if sample_id in seen:
            raise ManifestError(f"duplicate sample_id {sample_id!r}", line=line)
        seen.add(sample_id)

        label_norm = label_token.lower()
        if label_norm == "bona_fide":
            if species_token:
                raise ManifestError(
                    f"species must be empty for bona fide rows, got {species_token!r}",
                    line=line,
                )
            label = BONA_FIDE
        elif label_norm == "attack":
            if not species_token:
                raise ManifestError("attack row is missing its species", line=line)
            try:
                label = PresentationLabel.attack(PaiSpecies.parse(species_token))
            except ValueError as exc:
                raise ManifestError(str(exc), line=line) from None
        else:
            raise ManifestError(
                f"unknown label {label_token!r} (expected bona_fide or attack)", line=line
            )

        records.append(
            SampleRecord(
                sample_id=sample_id,
                image_path=image_path,
                label=label,
                device=CaptureDevice.from_string(device),
            )
        )

    return DatasetManifest(samples=tuple(records))


def load_manifest(path) -> DatasetManifest:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return parse_manifest(handle.read())
