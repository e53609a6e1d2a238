"""
The compile pipeline shared by the CLI and the HTTP service:
parse -> validate -> split -> emit.
"""
import logging
from typing import Iterable, List, Optional, Tuple, Union

from pydantic import BaseModel

from app.core.errors import DiagnosticsError
from app.schemas.behavior_schema import Event, TraceEntry
from app.schemas.diagnostic_schema import Diagnostic, has_errors
from app.schemas.emit_schema import EmitOptions
from app.schemas.logical_schema import LogicalModel
from app.schemas.transform_schema import HintSet
from app.schemas.uiml_schema import UimlDocument
from app.schemas.vocabulary_schema import FamilyId, Vocabulary
from app.services import behavior_service
from app.services.emit_service import EXTENSIONS, emit
from app.services.logical_service import lower
from app.services.parser_service import parse_uiml_located, serialize
from app.services.transform_service import split
from app.services.vocabulary_service import builtin_generic_vocabulary, builtin_target_vocabulary, validate_document

logger = logging.getLogger(__name__)


class RenderedFamily(BaseModel):
    family: FamilyId
    platform_uiml: str
    markup: str
    extension: str

    def filenames(self, stem: str) -> Tuple[str, str]:
        """(markup file, intermediate platform UIML file)"""
        return f"{stem}.{self.family.value}.{self.extension}", f"{stem}.{self.family.value}.uiml"


class PipelineService:
    def check(
        self, data: Union[bytes, str], source_name: str = "", vocab: Optional[Vocabulary] = None
    ) -> Tuple[UimlDocument, List[Diagnostic]]:
        """Parse and validate; raises DiagnosticsError on any error, returns warnings otherwise"""
        doc, source_map = parse_uiml_located(data, source_name)
        diagnostics = validate_document(doc, vocab or builtin_generic_vocabulary(), source_map)
        if has_errors(diagnostics):
            raise DiagnosticsError(diagnostics)
        return doc, diagnostics

    def render_document(
        self,
        doc: UimlDocument,
        families: Iterable,
        hints: Optional[HintSet] = None,
        opts: Optional[EmitOptions] = None,
    ) -> List[RenderedFamily]:
        rendered = []
        for family, platform in split(doc, families, hints):
            closure = validate_document(platform, builtin_target_vocabulary(family))
            if has_errors(closure):
                logger.error(f"Platform document for {family.value} does not validate against its vocabulary")
                raise DiagnosticsError(closure)
            rendered.append(RenderedFamily(
                family=family,
                platform_uiml=serialize(platform),
                markup=emit(platform, family, opts),
                extension=EXTENSIONS[family],
            ))
        logger.info(f"✓ Rendered {doc.source_name or '<document>'} for {len(rendered)} family(ies)")
        return rendered

    def render(
        self,
        data: Union[bytes, str],
        families: Iterable,
        source_name: str = "",
        hints: Optional[HintSet] = None,
        opts: Optional[EmitOptions] = None,
        vocab: Optional[Vocabulary] = None,
    ) -> List[RenderedFamily]:
        doc, _ = self.check(data, source_name, vocab)
        return self.render_document(doc, families, hints, opts)

    def lower(self, model: LogicalModel) -> str:
        return serialize(lower(model))

    def simulate(
        self,
        data: Union[bytes, str],
        events: List[Event],
        source_name: str = "",
        interface_name: Optional[str] = None,
        vocab: Optional[Vocabulary] = None,
    ) -> List[TraceEntry]:
        doc, _ = self.check(data, source_name, vocab)
        return behavior_service.run(doc, events, interface_name, vocab or builtin_generic_vocabulary())


# Singleton instance
pipeline_service = PipelineService()
