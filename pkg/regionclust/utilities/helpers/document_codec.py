from json.decoder import JSONDecodeError
from pathlib import Path
from typing import TypeVar

from pydantic import BaseModel, ValidationError

from regionclust.errors import InputFileError

DocumentT = TypeVar("DocumentT", bound=BaseModel)


class DocumentValidationError(InputFileError):
    """
    Raised when an invalid or corrupted document is received.
    """

    def __init__(self, source: str, reason: str) -> None:
        super().__init__(f"Invalid document {source}: {reason}")


class DocumentEncoder:
    """
    A class providing methods for encoding and decoding result documents as JSON text.
    """

    @staticmethod
    def encode(document: BaseModel) -> str:
        """
        Encode a document to indented JSON.

        Parameters:
            document (BaseModel): The document to be encoded.

        Returns:
            str: JSON text, floats written with round-trip precision.
        """
        return document.model_dump_json(indent=2)

    @staticmethod
    def decode(text: str | bytes, model: type[DocumentT], source: str = "<text>") -> DocumentT:
        """
        Decode JSON text back to a document.

        Parameters:
            text (str | bytes): The JSON text to be decoded.
            model (type[DocumentT]): The document class to validate against.
            source (str): Name used in error messages.

        Returns:
            DocumentT: Decoded document.

        Raises:
            DocumentValidationError: If the input is not valid JSON or does not match the schema.
        """
        try:
            return model.model_validate_json(text)
        except (ValidationError, JSONDecodeError) as exc:
            raise DocumentValidationError(source, str(exc).splitlines()[0]) from exc

    @classmethod
    def write(cls, document: BaseModel, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(cls.encode(document) + "\n", encoding="utf-8")
        return path

    @classmethod
    def read(cls, path: Path, model: type[DocumentT]) -> DocumentT:
        """
        Raises:
            InputFileError: If the file cannot be read.
            DocumentValidationError: If its content is not a valid document.
        """
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputFileError(f"Cannot read {path}: {exc.strerror}") from exc
        return cls.decode(text, model, source=str(path))
