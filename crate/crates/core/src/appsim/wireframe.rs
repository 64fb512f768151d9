use std::fmt::Write;

use sha2::{Digest, Sha256};

use super::model::{ComponentType, GuiComponent, ScreenInstance, ScreenSize};

pub(crate) fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn fill(c: &GuiComponent) -> &'static str {
    match c.comp_type {
        ComponentType::Layout => "#fafafa",
        ComponentType::Button => "#dbe8fb",
        ComponentType::TextField => "#ffffff",
        ComponentType::TextView => "#f3f3f3",
        ComponentType::ImageView => "#e6e6e6",
        ComponentType::List => "#f7f7f2",
        ComponentType::Checkbox => "#eef7ee",
        ComponentType::DropDown => "#f2ecfa",
        ComponentType::MenuItem => "#fdf6e3",
    }
}

/// Schematic SVG of a screen. The component named by `highlight` is drawn
/// with a red outline.
pub fn render_wireframe(
    screen: &ScreenInstance,
    size: ScreenSize,
    highlight: Option<&str>,
) -> String {
    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = size.width,
        h = size.height + 24
    );
    let _ = write!(
        svg,
        r##"<rect x="0" y="0" width="{}" height="24" fill="#37474f"/><text x="8" y="16" fill="#ffffff">{}</text>"##,
        size.width,
        escape(&screen.name)
    );
    let _ = write!(svg, r#"<g transform="translate(0,24)">"#);
    for (_, c) in screen.root.walk() {
        let b = c.bounds;
        let stroke = if c.flags.enabled {
            "#90a4ae"
        } else {
            "#cfd8dc"
        };
        let _ = write!(
            svg,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="{}" data-id="{}"/>"#,
            b.x,
            b.y,
            b.width,
            b.height,
            fill(c),
            stroke,
            escape(&c.id)
        );
        let mut caption = if !c.text.is_empty() {
            c.text.clone()
        } else if !c.label.is_empty() {
            c.label.clone()
        } else if c.comp_type != ComponentType::Layout {
            c.description.clone()
        } else {
            String::new()
        };
        if c.flags.checkable {
            caption = format!("{} {}", if c.checked { "[x]" } else { "[ ]" }, caption);
        }
        if !caption.trim().is_empty() {
            let _ = write!(
                svg,
                r##"<text x="{}" y="{}" fill="#263238">{}</text>"##,
                b.x + 6,
                b.y + (b.height / 2).min(20) + 4,
                escape(caption.trim())
            );
        }
    }
    if let Some(c) = highlight.and_then(|id| screen.component(id)) {
        let b = c.bounds;
        let _ = write!(
            svg,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#d32f2f" stroke-width="3" class="highlight"/>"##,
            b.x, b.y, b.width, b.height
        );
    }
    svg.push_str("</g></svg>");
    svg
}

/// Content address of a rendered wireframe.
pub fn wireframe_ref(svg: &str) -> String {
    let digest = Sha256::digest(svg.as_bytes());
    format!("wf-{}", hex::encode(&digest[..8]))
}
