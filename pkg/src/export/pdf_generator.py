"""
Gerador de PDFs a partir dos relatórios Markdown, com os gráficos embutidos.
"""
import base64
from pathlib import Path
from typing import Optional

import markdown
from bs4 import BeautifulSoup
from weasyprint import CSS, HTML

from .atomic import atomic_output

_MIME_TYPES = {'.png': 'image/png', '.jpg': 'image/jpeg', '.jpeg': 'image/jpeg',
               '.svg': 'image/svg+xml'}


class PDFGenerator:
    """Converte relatórios Markdown em PDF."""

    REPORT_CSS = """
    @page {
        size: A4 landscape;
        margin: 1.5cm 1.8cm;
        @bottom-right { content: counter(page) "/" counter(pages); font-size: 8pt; color: #777; }
    }
    body { font-family: 'DejaVu Sans', 'Arial', sans-serif; font-size: 10pt; color: #333; }
    h1 { color: #2c3e50; border-bottom: 3px solid #3498db; padding-bottom: 8px; font-size: 20pt; }
    h2 { color: #34495e; border-bottom: 1px solid #95a5a6; font-size: 14pt;
         page-break-after: avoid; }
    table { border-collapse: collapse; width: 100%; margin: 12px 0; font-size: 9pt;
            page-break-inside: avoid; }
    th { background-color: #3498db; color: white; padding: 6px; text-align: left; }
    td { border: 1px solid #ddd; padding: 5px; }
    tr:nth-child(even) { background-color: #f8f9fa; }
    code { background-color: #f4f4f4; padding: 1px 4px; font-size: 8pt; word-break: break-all; }
    img { max-width: 100%; display: block; margin: 12px auto; page-break-inside: avoid; }
    """

    def __init__(self, output_dir: Path):
        """
        Inicializa o gerador de PDFs.

        Args:
            output_dir: Diretório onde os PDFs serão salvos
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def _embed_images_in_html(self, html_content: str, md_file_path: Path) -> str:
        """Troca as imagens locais por data URIs em base64."""
        soup = BeautifulSoup(html_content, 'html.parser')
        for img in soup.find_all('img'):
            src = img.get('src')
            if not src or src.startswith(('http://', 'https://', 'data:')):
                continue
            img_path = md_file_path.parent / src
            if not img_path.exists():
                print(f"⚠️  Imagem não encontrada: {img_path}")
                continue
            data = base64.b64encode(img_path.read_bytes()).decode('ascii')
            mime_type = _MIME_TYPES.get(img_path.suffix.lower(), 'image/png')
            img['src'] = f"data:{mime_type};base64,{data}"
        return str(soup)

    def render_html(self, md_file_path: Path, title: Optional[str] = None) -> str:
        """HTML completo do relatório, com as imagens embutidas."""
        md_file_path = Path(md_file_path)
        md_processor = markdown.Markdown(extensions=['tables', 'fenced_code', 'sane_lists'])
        html_body = md_processor.convert(md_file_path.read_text(encoding='utf-8'))
        doc_title = title or md_file_path.stem.replace('_', ' ')
        html_content = (
            '<!DOCTYPE html><html lang="pt-BR"><head><meta charset="UTF-8">'
            f'<title>{doc_title}</title></head><body>{html_body}</body></html>'
        )
        return self._embed_images_in_html(html_content, md_file_path)

    def markdown_to_pdf(self, md_file_path: Path, pdf_file_path: Optional[Path] = None,
                        title: Optional[str] = None) -> Path:
        """
        Converte um relatório Markdown para PDF (escrita atômica).

        Args:
            md_file_path: Caminho do arquivo .md
            pdf_file_path: Caminho de saída (padrão: mesmo nome, no diretório de saída)
            title: Título do documento

        Returns:
            Caminho do PDF gerado

        Raises:
            FileNotFoundError: Se o Markdown não existir
        """
        md_file_path = Path(md_file_path)
        if not md_file_path.exists():
            raise FileNotFoundError(f"Relatório não encontrado: {md_file_path}")
        if pdf_file_path is None:
            pdf_file_path = self.output_dir / f"{md_file_path.stem}.pdf"

        html_content = self.render_html(md_file_path, title)
        with atomic_output(pdf_file_path) as temp_path:
            HTML(string=html_content, base_url=str(md_file_path.parent)).write_pdf(
                temp_path, stylesheets=[CSS(string=self.REPORT_CSS)])
        return Path(pdf_file_path)
